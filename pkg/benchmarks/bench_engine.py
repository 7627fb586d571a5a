"""Compare the compiled and pure-Python simulation cores.

Runs identical random-agent play-throughs on each bundled game with both
backends (the pure one in a subprocess with RULEGEN_PURE=1) and reports
frames per second.

Usage: python3 benchmarks/bench_engine.py [plays] [max_steps]
"""

import json
import os
import subprocess
import sys

WORKER = """
import json, random, sys, time
from rulegen import engine, fixtures
from rulegen.agents import make_agent

plays, max_steps = int(sys.argv[1]), int(sys.argv[2])
results = {}
for name in fixtures.FIXTURE_NAMES:
    game, level = fixtures.load(name)
    frames = 0
    started = time.perf_counter()
    for seed in range(plays):
        agent = make_agent("random", rng=random.Random(seed))
        out = engine.simulate(game, level, agent, max_steps, seed)
        frames += out.total_frames
    results[name] = {"frames": frames,
                     "seconds": time.perf_counter() - started}
print(json.dumps({"backend": engine.BACKEND, "games": results}))
"""


def run(pure, plays, max_steps):
    env = dict(os.environ)
    env.pop("RULEGEN_PURE", None)
    if pure:
        env["RULEGEN_PURE"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(plays), str(max_steps)],
        capture_output=True, text=True, env=env, check=True)
    return json.loads(proc.stdout)


def main():
    plays = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    max_steps = int(sys.argv[2]) if len(sys.argv) > 2 else 500
    compiled = run(False, plays, max_steps)
    pure = run(True, plays, max_steps)
    if compiled["backend"] == pure["backend"]:
        print("compiled backend unavailable; both runs used the pure core")
    print(f"{'game':<14}{'pure fps':>12}{'compiled fps':>14}{'speedup':>10}")
    for name in compiled["games"]:
        c, p = compiled["games"][name], pure["games"][name]
        cf, pf = c["frames"] / c["seconds"], p["frames"] / p["seconds"]
        print(f"{name:<14}{pf:>12.0f}{cf:>14.0f}{cf / pf:>9.2f}x")


if __name__ == "__main__":
    main()
