"""End-to-end checks of the qbaker command-line tool."""

import math
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

BIN = os.environ.get("QBAKER_BIN", "qbaker")
P8 = "1947270476915296449559703445493848930452791205"


def run(*args, check=True):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"{args} exited {proc.returncode}: {proc.stderr}")
    return proc


def write_pgm(path, pixels, maxval=255):
    h, w = pixels.shape
    data = pixels.astype(">u2" if maxval > 255 else "u1").tobytes()
    path.write_bytes(f"P5\n{w} {h}\n{maxval}\n".encode() + data)


def image_set(tmp, name, count=3, side=32, seed=0):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:side, 0:side]
    names = []
    for m in range(count):
        img = 128 + 60 * np.sin(xx / 7.0 + m) * np.cos(yy / 5.0) + rng.normal(0, 4, (side, side))
        file = tmp / f"{name}{m}.pgm"
        write_pgm(file, np.clip(img, 0, 255).astype(np.uint8))
        names.append(file.name)
    manifest = tmp / f"{name}.txt"
    manifest.write_text("\n".join(names) + "\n")
    return manifest


def pgm_bytes(manifest):
    lines = [l.strip() for l in Path(manifest).read_text().splitlines()]
    return [(Path(manifest).parent / l).read_bytes() for l in lines if l and not l.startswith("#")]


def test_keygen_is_seeded_and_validated(tmp_path):
    run("keygen", "--out", tmp_path / "a.key", "--images", 3, "--seed", 7)
    run("keygen", "--out", tmp_path / "b.key", "--images", 3, "--seed", 7)
    assert (tmp_path / "a.key").read_text() == (tmp_path / "b.key").read_text()
    run("keygen", "--out", tmp_path / "c.key")
    assert "version = 1" in (tmp_path / "c.key").read_text()
    bad = run("keygen", "--out", tmp_path / "d.key", "--lambda1", "0.5", "--lambda2", "3", check=False)
    assert bad.returncode == 1
    assert not (tmp_path / "d.key").exists()
    assert run("keygen", "--out", tmp_path / "e.key", "--qm", 3, check=False).returncode == 1


def test_encrypt_decrypt_round_trip(tmp_path):
    plain = image_set(tmp_path, "plain")
    key = tmp_path / "k.key"
    run("keygen", "--out", key, "--images", 3, "--seed", 11)
    run("encrypt", "--in", plain, "--key", key, "--out", tmp_path / "cipher.txt", "--key-out", tmp_path / "full.key")
    assert "intensity_sum" not in key.read_text()
    assert "intensity_sum" in (tmp_path / "full.key").read_text()
    assert len(pgm_bytes(tmp_path / "cipher.txt")) == 8
    run("decrypt", "--in", tmp_path / "cipher.txt", "--key", tmp_path / "full.key", "--out", tmp_path / "back.txt")
    assert pgm_bytes(tmp_path / "back.txt") == pgm_bytes(plain)

    # Thread count does not change the output.
    run("--threads", 1, "encrypt", "--in", plain, "--key", key, "--out", tmp_path / "c1.txt", "--key-out", tmp_path / "k1.key")
    assert pgm_bytes(tmp_path / "c1.txt") == pgm_bytes(tmp_path / "cipher.txt")


def test_sixteen_bit_images(tmp_path):
    rng = np.random.default_rng(3)
    write_pgm(tmp_path / "deep.pgm", rng.integers(0, 4096, (16, 16)), maxval=4095)
    (tmp_path / "deep.txt").write_text("deep.pgm\n")
    run("keygen", "--out", tmp_path / "k.key", "--bits", 12, "--seed", 1)
    run("encrypt", "--in", tmp_path / "deep.txt", "--key", tmp_path / "k.key", "--out", tmp_path / "c.txt")
    run("decrypt", "--in", tmp_path / "c.txt", "--key", tmp_path / "k.key", "--out", tmp_path / "d.txt")
    assert pgm_bytes(tmp_path / "d.txt") == pgm_bytes(tmp_path / "deep.txt")


def test_decrypt_errors_and_wrong_key(tmp_path):
    plain = image_set(tmp_path, "plain", count=2, side=16)
    run("keygen", "--out", tmp_path / "k.key", "--images", 2, "--seed", 5)
    run("keygen", "--out", tmp_path / "other.key", "--images", 2, "--seed", 6)
    run("encrypt", "--in", plain, "--key", tmp_path / "k.key", "--out", tmp_path / "c.txt")
    missing = run("decrypt", "--in", tmp_path / "c.txt", "--key", tmp_path / "nope.key", "--out", tmp_path / "d.txt", check=False)
    assert missing.returncode != 0
    # A key without the recorded sums is a data error.
    fresh = run("decrypt", "--in", tmp_path / "c.txt", "--key", tmp_path / "other.key", "--out", tmp_path / "d.txt", check=False)
    assert fresh.returncode == 2
    # Graft the sums onto the other key: wrong key, complete file.
    sums = [l for l in (tmp_path / "k.key").read_text().splitlines() if l.startswith(("n =", "r_max", "intensity_sum", "bit_count"))]
    (tmp_path / "wrong.key").write_text((tmp_path / "other.key").read_text() + "\n".join(sums) + "\n")
    wrong = run("decrypt", "--in", tmp_path / "c.txt", "--key", tmp_path / "wrong.key", "--out", tmp_path / "w.txt")
    assert "padding" in wrong.stderr
    assert pgm_bytes(tmp_path / "w.txt") != pgm_bytes(plain)
    (tmp_path / "junk.key").write_text("version = 1\nimages = two\n")
    assert run("decrypt", "--in", tmp_path / "c.txt", "--key", tmp_path / "junk.key", "--out", tmp_path / "x.txt", check=False).returncode == 2


def test_bad_images(tmp_path):
    write_pgm(tmp_path / "odd.pgm", np.zeros((30, 30), dtype=np.uint8))
    (tmp_path / "odd.txt").write_text("odd.pgm\n")
    run("keygen", "--out", tmp_path / "k.key", "--seed", 1)
    res = run("encrypt", "--in", tmp_path / "odd.txt", "--key", tmp_path / "k.key", "--out", tmp_path / "c.txt", check=False)
    assert res.returncode == 2


def test_partitions():
    assert run("partitions", "count", 8).stdout.strip() == P8
    listing = run("partitions", "list", 3).stdout.strip().splitlines()
    assert len(listing) == 26
    assert listing[0] == "0 8"
    assert run("partitions", "unrank", 2, 4).stdout.strip() == "1,1,1,1"
    assert run("partitions", "unrank", 8, int(P8) - 1).returncode == 0
    assert run("partitions", "unrank", 8, P8, check=False).returncode == 2
    check = run("partitions", "check", "2,4,2", check=False)
    assert "inadmissible" in check.stdout and check.returncode == 3
    assert "admissible" in run("partitions", "check", "4,2,2").stdout
    assert run("partitions", "list", 4, check=False).returncode == 1


def test_circuits(tmp_path):
    run("circuit", "synth", "4,2,2", "--out", tmp_path / "c.txt")
    assert "pass" in run("circuit", "verify", tmp_path / "c.txt", "4,2,2").stdout
    big = tmp_path / "big.txt"
    big.write_text(run("circuit", "synth", "16,8,8,32,64,128").stdout)
    out = run("circuit", "verify", big, "16,8,8,32,64,128").stdout
    assert "65536" in out and "pass" in out
    assert run("circuit", "verify", tmp_path / "c.txt", "2,2,4", check=False).returncode == 3
    stats = run("circuit", "stats", tmp_path / "c.txt").stdout
    assert "gates = " in stats and "controlled = " in stats
    (tmp_path / "bad.txt").write_text("# n=3\nSWAP x0 q1\n")
    assert run("circuit", "stats", tmp_path / "bad.txt", check=False).returncode == 2


def test_analyze(tmp_path):
    plain = image_set(tmp_path, "plain", count=3, side=64)
    run("keygen", "--out", tmp_path / "k.key", "--images", 3, "--seed", 2)
    run("encrypt", "--in", plain, "--key", tmp_path / "k.key", "--out", tmp_path / "c.txt")
    report = run("analyze", "--in", tmp_path / "c.txt", "--ref", tmp_path / "c.txt", "--csv", tmp_path / "m.csv").stdout
    assert "npcr = 0.000000" in report and "uaci = 0.000000" in report
    assert report.count("[image.") == 8
    assert (tmp_path / "m.csv").read_text().startswith("image,chi2,")
    robust = run("analyze", "--in", tmp_path / "c.txt", "--key", tmp_path / "k.key", "--plain", plain,
                 "--block", "0,0,16,16", "--density", "0", "--seed", 4).stdout
    assert "[occlusion]" in robust and "[noise]" in robust
    assert "psnr.0 = inf" in robust.split("[noise]")[1]
    assert run("analyze", "--in", tmp_path / "c.txt", "--block", "1,2", check=False).returncode == 1


def test_appendix(tmp_path):
    csv = run("appendix", "henon", "--count", 10, "--x0", 0.25, "--y0", -0.5).stdout.splitlines()
    assert csv[0] == "i,x,y" and len(csv) == 11
    assert csv[1] == "0,0.25,-0.5"
    run("appendix", "chebyshev", "--kmax", 3, "--points", 6, "--out", tmp_path / "t.csv")
    rows = (tmp_path / "t.csv").read_text().splitlines()
    assert rows[0] == "x,T0,T1,T2,T3"
    cells = [float(c) for c in rows[5].split(",")]
    assert math.isclose(cells[0], 0.6, abs_tol=1e-15)
    assert math.isclose(cells[3], -0.28, abs_tol=1e-14)


def test_config_file(tmp_path):
    (tmp_path / "opts.ini").write_text("threads = 2\n[keygen]\nimages = 2\nseed = 9\n")
    run("--config", tmp_path / "opts.ini", "keygen", "--out", tmp_path / "k.key")
    assert "images = 2" in (tmp_path / "k.key").read_text()
    run("keygen", "--out", tmp_path / "k2.key", "--images", 2, "--seed", 9)
    assert (tmp_path / "k.key").read_text() == (tmp_path / "k2.key").read_text()


def test_usage_errors():
    assert run(check=False).returncode == 1
    assert run("encrypt", check=False).returncode == 1
    assert run("frobnicate", check=False).returncode == 1
    assert run("--help").returncode == 0
