"""
Scenario files end to end
=========================

Everything the library does is also reachable from the command line:
describe a scenario in an INI file, point a subcommand at it, read
the files it writes. This script drives the CLI in-process and shows
the artifacts. The equivalent shell session is

    gyrostat simulate --config body.ini --out out/spin
    gyrostat hj-check --config probe.ini --out out/probe
"""

import tempfile
from pathlib import Path

from gyrostat.cli import main

BODY = """\
[system]
kind = rigid_body_rotors

[params]
ibar = 1.0 2.0 3.0
j = 0.5 0.4 0.3

[initial]
pi = 1.0 0.5 -0.2
l = 0.1 0.2 0.3

[run]
dt = 0.01
t_final = 2.0
"""

# Same system, plus a candidate section for the residual check: the
# exact one-form of W = |theta|^2 / 2 + (3, 0, 0) . theta.
PROBE = BODY + """
[gamma]
kind = exact_dW
name = rotor_quadratic
samples = 12
"""

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "body.ini").write_text(BODY)
    (tmp / "probe.ini").write_text(PROBE)

    code = main(["simulate", "--config", str(tmp / "body.ini"),
                 "--out", str(tmp / "spin"), "--quiet"])
    print("simulate exit code:", code)
    print("\n--- drift_summary.txt " + "-" * 40)
    print((tmp / "spin" / "drift_summary.txt").read_text())
    csv = (tmp / "spin" / "trajectory.csv").read_text().splitlines()
    print("--- trajectory.csv (first 3 of %d rows) %s" % (len(csv) - 1,
                                                          "-" * 20))
    for line in csv[:4]:
        print(line if len(line) < 100 else line[:97] + "...")

    code = main(["hj-check", "--config", str(tmp / "probe.ini"),
                 "--out", str(tmp / "probe_out"), "--quiet"])
    print("\nhj-check exit code:", code)
    print("\n--- hj_report.txt " + "-" * 44)
    print((tmp / "probe_out" / "hj_report.txt").read_text())
