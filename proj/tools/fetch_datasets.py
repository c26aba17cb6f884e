#!/usr/bin/env python3
"""Fetch the UCI breast cancer and Movielens 100k files through pip.

The original hosts are often unreachable from build machines, so both files
are recovered from Python packages that ship them:

  breast-cancer-wisconsin.data  MASS `biopsy` table inside the pydataset sdist
  u.data                        ml-100k.inter inside the recbole wheel

The Pima diabetes table has no such source; pass --pima to copy a local
`diabetes.csv` into place.
"""

import argparse
import csv
import hashlib
import io
import shutil
import subprocess
import sys
import tarfile
import tempfile
import zipfile
from pathlib import Path

UDATA_MD5 = "6e47046882bad158b0efbb84cd5cb987"


def pip_download(spec, dest, binary):
    cmd = [sys.executable, "-m", "pip", "download", "--no-deps", "-d", str(dest), spec]
    cmd += ["--only-binary", ":all:"] if binary else ["--no-binary", ":all:", "--no-build-isolation"]
    subprocess.run(cmd, check=True, stdout=subprocess.DEVNULL)
    return next(p for p in dest.iterdir() if p.name.lower().startswith(spec.split("=")[0].lower()))


def breast_cancer(tmp, out):
    sdist = pip_download("pydataset==0.2.0", tmp, binary=False)
    with tarfile.open(sdist) as outer:
        inner_member = next(m for m in outer.getmembers() if m.name.endswith("resources.tar.gz"))
        inner = tarfile.open(fileobj=io.BytesIO(outer.extractfile(inner_member).read()))
    member = next(m for m in inner.getmembers() if m.name.endswith("csv/MASS/biopsy.csv"))
    rows = csv.reader(io.TextIOWrapper(inner.extractfile(member), encoding="utf-8"))
    next(rows)
    lines = []
    for row in rows:
        sample_id, feats, cls = row[1], row[2:11], row[11]
        feats = ["?" if v == "NA" else v for v in feats]
        label = {"benign": "2", "malignant": "4"}[cls]
        lines.append(",".join([sample_id, *feats, label]))
    out.write_text("\n".join(lines) + "\n")
    print(f"{out}: {len(lines)} records")


def movielens(tmp, out):
    wheel = pip_download("recbole==1.2.1", tmp, binary=True)
    with zipfile.ZipFile(wheel) as z:
        text = z.read("recbole/dataset_example/ml-100k/ml-100k.inter").decode()
    body = text.split("\n", 1)[1]
    out.write_text(body)
    digest = hashlib.md5(body.encode()).hexdigest()
    print(f"{out}: {body.count(chr(10))} ratings, md5 {digest}")
    if digest != UDATA_MD5:
        print("warning: md5 differs from the reference u.data", file=sys.stderr)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dest", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--pima", help="local Pima CSV to copy as diabetes.csv")
    args = ap.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as t:
        tmp = Path(t)
        (tmp / "bc").mkdir()
        (tmp / "ml").mkdir()
        breast_cancer(tmp / "bc", dest / "breast-cancer-wisconsin.data")
        movielens(tmp / "ml", dest / "u.data")
    if args.pima:
        shutil.copyfile(args.pima, dest / "diabetes.csv")
        print(f"{dest / 'diabetes.csv'}: copied")


if __name__ == "__main__":
    main()
