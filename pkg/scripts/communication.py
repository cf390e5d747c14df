"""Bytes exchanged per step over each interface link, for growing N."""
from ktinterface.runner import RunConfig, expected_link_bytes_per_step, run_single


def main():
    for problem, ns, m in (("advection", (40, 160, 640), 1), ("implosion", (21, 41, 81), 4)):
        for n in ns:
            res = run_single(RunConfig(problem, resolutions=(n,), t_end=0.01,
                                       simulate_distributed=True), n)
            print(f"{problem:9s} N={n:4d}  bytes/step by link: {res.bytes_per_step}")
        print(f"  {expected_link_bytes_per_step(m)} bytes/step per shared interface point")


if __name__ == "__main__":
    main()
