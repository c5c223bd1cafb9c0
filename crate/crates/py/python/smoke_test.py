"""Smoke test for the abekit Python module.

Build first with `cargo build -p abekit-py` (or `maturin develop` inside
crates/py). When `abekit` is not importable the script loads the shared
library straight from the cargo target directory.
"""

import importlib.util
import os
import shutil
import sys
import tempfile
from pathlib import Path


def load_abekit():
    try:
        import abekit

        return abekit
    except ImportError:
        pass
    root = Path(__file__).resolve().parents[3]
    target = Path(os.environ.get("CARGO_TARGET_DIR", root / "target"))
    for profile in ("release", "debug"):
        lib = target / profile / "libabekit.so"
        if lib.exists():
            # the loader wants the file name to match the module name
            tmp = Path(tempfile.mkdtemp()) / "abekit.so"
            shutil.copy(lib, tmp)
            spec = importlib.util.spec_from_file_location("abekit", tmp)
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("abekit not found: run `cargo build -p abekit-py` first")


def main():
    abekit = load_abekit()

    info = abekit.explain("A < 32768")
    assert (info["leaves"], info["and_gates"]) == (3, 1), info
    assert abekit.satisfies("(Doctor and Cardiology) or Age < 11", "Age=9")
    assert not abekit.satisfies("Doctor and Cardiology", "Doctor")

    cp = abekit.CpAuthority(level=80, seed=1)
    pk = cp.public_key()
    doctor = cp.keygen("Doctor, Cardiology, Age=42")
    nurse = cp.keygen("Nurse")
    sealed = abekit.cp_seal(pk, "Doctor and (Cardiology or Age >= 65)", b"ecg trace")
    assert abekit.cp_open(pk, doctor, sealed) == b"ecg trace"
    try:
        abekit.cp_open(pk, nurse, sealed)
        raise AssertionError("nurse key opened the container")
    except abekit.PolicyNotSatisfied:
        pass
    tampered = bytearray(sealed)
    tampered[-1] ^= 1
    try:
        abekit.cp_open(pk, doctor, bytes(tampered))
        raise AssertionError("tampered container opened")
    except abekit.AuthenticationFailure:
        pass

    again = abekit.CpAuthority.load(pk, cp.master_key())
    assert abekit.cp_open(pk, again.keygen("Doctor, Cardiology"), sealed) == b"ecg trace"

    kp = abekit.KpAuthority(level=112, seed=2)
    key = kp.keygen("Dev_type=Sensor and Location=Ward_3")
    box = abekit.kp_seal(kp.public_key(), kp.public_universe(), "Dev_type=Sensor, Location=Ward_3", b"spo2")
    assert abekit.kp_open(kp.public_key(), key, box) == b"spo2"

    counts = abekit.op_counts("cp", "encrypt", 5)
    assert counts["hash_to_group"] == 5, counts
    assert counts["exp_g1"] + counts["exp_g2"] + counts["exp_gt"] == 2 * 5 + 3, counts
    assert abekit.op_counts("cp", "decrypt", 5)["pairings"] == 11

    print("abekit python smoke test: ok")


if __name__ == "__main__":
    main()
