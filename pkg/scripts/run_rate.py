"""Log-log MSE slope of rate-optimal LPEs for several bandwidth constants."""
import argparse

from interplpe.sim import rate_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--alphas", default="0.5,1,2")
    ap.add_argument("--replications", type=int, default=50)
    ap.add_argument("--kernel", default="k2")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for alpha in (float(a) for a in args.alphas.split(",")):
        res = rate_study(beta_nominal=args.beta, replications=args.replications,
                         kernel=args.kernel, alpha=alpha, seed=args.seed)
        mses = " ".join(f"{m:.5f}" for m in res.mean_mse)
        print(f"alpha={alpha:<4} slope={res.slope:+.3f} expected={res.expected_slope:+.3f}  "
              f"mse: {mses}")


if __name__ == "__main__":
    main()
