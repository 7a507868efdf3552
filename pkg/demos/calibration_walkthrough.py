"""How every sign and orientation gets fixed.

The underlying identities only hold for one combination of conventions, so
the calibration tries each alternative and keeps the survivor.  Flipping any
entry afterwards breaks at least one suite, which is what the negative
controls verify.
Run:  python3 demos/calibration_walkthrough.py
"""
from equivgerbe.calibration import calibrate
from equivgerbe.conventions import CALIBRATED
from equivgerbe.harness import SuiteConfig, run_suite

found = calibrate()
print(found.as_text())
print("matches the frozen record:", found == CALIBRATED)

print("\nflipping one entry at a time:")
for key, suite in [("cartan_sign", "cartan"), ("delta_mu_s2", "deltamu"), ("chi_sign", "prequant")]:
    rep = run_suite(SuiteConfig(suite=suite, samples=4, N=32, M=512, band=2), CALIBRATED.flipped(key))
    bad = [c["name"] for c in rep.checks if not c["passed"]]
    print(f"  {key:>16} -> {suite}: {'FAIL' if bad else 'pass'} ({', '.join(bad)})")
