import numpy as np
import pytest

from cafewall import image
from cafewall.cli import build_parser, main


def run(argv, cwd):
    import contextlib, os
    old = os.getcwd()
    os.chdir(cwd)
    try:
        return main(argv)
    finally:
        os.chdir(old)


def test_generate_default_name(tmp_path):
    assert run(["generate"], tmp_path) == 0
    out = tmp_path / "cafewall_9x14_T200_M8.png"
    assert out.exists()
    assert image.read_image(out).shape == (1864, 2800)


def test_generate_fig3_pattern(tmp_path):
    assert run(["generate", "--rows", "8", "--cols", "12", "--tile", "50",
                "--mortar", "2", "-o", "wall.png"], tmp_path) == 0
    assert image.read_image(tmp_path / "wall.png").shape == (414, 600)


def test_generate_pgm_output(tmp_path):
    assert run(["generate", "--rows", "2", "--cols", "2", "--tile", "10",
                "--mortar", "2", "-o", "w.pgm"], tmp_path) == 0
    assert image.read_pgm(tmp_path / "w.pgm").shape == (22, 20)


def test_generate_parameter_error_exit_code(tmp_path, capsys):
    assert run(["generate", "--rows", "0"], tmp_path) == 1
    err = capsys.readouterr().err
    assert err.startswith("cafewall: error:") and err.count("\n") == 1


def test_unknown_flag_rejected(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["generate", "--bogus"], tmp_path)
    assert exc.value.code == 2


def test_dogmap_outputs(tmp_path):
    run(["generate", "--rows", "3", "--cols", "4", "--tile", "20", "--mortar", "2",
         "-o", "wall.png"], tmp_path)
    assert run(["dogmap", "-i", "wall.png", "--sigmas", "1,2", "-o", "maps"],
               tmp_path) == 0
    assert (tmp_path / "maps" / "wall_dog1.png").exists()
    assert (tmp_path / "maps" / "wall_dog2.png").exists()


def test_dogmap_default_stack_count(tmp_path):
    run(["generate", "--rows", "3", "--cols", "4", "--tile", "20", "--mortar", "2",
         "-o", "wall.png"], tmp_path)
    assert run(["dogmap", "-i", "wall.png", "--mortar", "2", "-o", "maps"],
               tmp_path) == 0
    assert len(list((tmp_path / "maps").glob("wall_dog*.png"))) == 7


def test_dogmap_binary_and_off_center(tmp_path):
    run(["generate", "--rows", "3", "--cols", "4", "--tile", "20", "--mortar", "2",
         "-o", "wall.png"], tmp_path)
    assert run(["dogmap", "-i", "wall.png", "--sigmas", "2", "--binary",
                "--off-center", "-o", "maps"], tmp_path) == 0
    bm = image.read_pgm(tmp_path / "maps" / "wall_dog2_binary.pgm")
    assert set(np.unique(bm)) <= {0.0, 1.0}


def test_analyze_stats_shape(tmp_path):
    run(["generate", "--rows", "4", "--cols", "6", "--tile", "20", "--mortar", "2",
         "-o", "wall.png"], tmp_path)
    assert run(["analyze", "-i", "wall.png", "--mortar", "2",
                "--fillgap", "8", "--minlength", "30", "-o", "res", "--overlay"],
               tmp_path) == 0
    lines = (tmp_path / "res" / "stats.csv").read_text().splitlines()
    assert lines[0] == "scale,bucket,count,meanAbsDev,stdDev,stdErr"
    assert len(lines) == 1 + 7 * 4
    assert (tmp_path / "res" / "segments.csv").exists()
    assert list((tmp_path / "res").glob("overlay_sigma*.png"))


def test_exp1_smoke_tree(tmp_path):
    assert run(["exp1", "--rows", "4", "--cols", "6", "--tile", "30", "--mortar", "2",
                "--crop", "2x2", "--samples", "2", "--numpeaks", "20",
                "--fillgap", "8", "--minlength", "40", "--seed", "42",
                "--jobs", "1", "-o", "out"], tmp_path) == 0
    assert (tmp_path / "out" / "exp1" / "crop2x2" / "stats.csv").exists()
    assert (tmp_path / "out" / "manifest.json").exists()


def test_exp2_smoke_tree(tmp_path):
    assert run(["exp2", "--rows", "4", "--cols", "6", "--tile", "30", "--mortar", "2",
                "--numpeaks", "20", "--fillgap", "8", "--minlength", "40",
                "-o", "out"], tmp_path) == 0
    lines = (tmp_path / "out" / "exp2" / "stats.csv").read_text().splitlines()
    assert len(lines) == 1 + 7 * 4


def test_config_file_precedence(tmp_path):
    (tmp_path / "run.cfg").write_text(
        "# reduced stimulus\nrows = 3\ncols = 4\ntile = 20\nmortar = 2\n")
    assert run(["generate", "--config", "run.cfg", "--cols", "5", "-o", "w.png"],
               tmp_path) == 0
    # flag beats file (cols=5), file beats default (rows=3, tile=20)
    assert image.read_image(tmp_path / "w.png").shape == (3 * 20 + 2 * 2, 5 * 20)


def test_config_file_unknown_key(tmp_path, capsys):
    (tmp_path / "run.cfg").write_text("bogus = 1\n")
    assert run(["generate", "--config", "run.cfg"], tmp_path) == 1


def test_help_lists_reference_defaults():
    parser = build_parser()
    for sub, expected in [
        ("exp1", ["100", "3", "40", "450", "replicate", "(default 2)", "(default 8)"]),
    ]:
        text = None
        for action in parser._subparsers._group_actions:
            if sub in action.choices:
                text = action.choices[sub].format_help()
        assert text is not None
        for token in expected:
            assert token in text
