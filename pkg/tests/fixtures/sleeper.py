"""Stand-in solver for harness tests: sleeps BASE * GROWTH**(N - N0) seconds
where N is the DIMENSION of the TSPLIB file given as first argument."""
import sys
import time

BASE = 0.2
GROWTH = 1.0724
N0 = 52

dim = None
with open(sys.argv[1], encoding="ascii") as fh:
    for line in fh:
        if line.startswith("DIMENSION"):
            dim = int(line.split(":")[1])
            break
time.sleep(BASE * GROWTH ** (dim - N0))
