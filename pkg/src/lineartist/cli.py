"""Command-line front end wiring all pipelines together.

Exit codes: 0 success, 1 option/validation error, 2 I/O error,
3 numerical failure (non-convergence or non-finite loss).
"""

import argparse
import json
import sys

import numpy as np

from . import asw, dataset, edge, feature, imgio, pencil, smooth, transfer

__all__ = ["main", "build_parser"]


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; the contract wants 1.
    def error(self, message):
        raise CLIError(message)


def _load_style_images(styles_dir, size=None):
    import os

    if not os.path.isdir(styles_dir):
        raise CLIError(f"--styles: {styles_dir} is not a directory")
    names = sorted(
        n
        for n in os.listdir(styles_dir)
        if os.path.splitext(n)[1].lower() in (".png", ".pgm", ".ppm")
    )
    if not names:
        raise CLIError(f"--styles: no supported images in {styles_dir}")
    images = [imgio.load_image(os.path.join(styles_dir, n)) for n in names]
    if size is not None:
        images = [imgio.resize(im, size[1], size[0]) for im in images]
    return names, images


def _cmd_smooth(args):
    img = imgio.load_image(args.input)
    params = smooth.L0Params(lam=args.lam, kappa=args.kappa, beta_max=args.beta_max)
    imgio.save_image(smooth.l0_smooth(img, params), args.output)


def _cmd_canny(args):
    img = imgio.to_grayscale(imgio.load_image(args.input))
    edges = edge.canny(img, sigma=args.sigma, t_low=args.low, t_high=args.high)
    imgio.save_image(edges.astype(np.float64), args.output)


def _cmd_sketch(args):
    img = imgio.to_grayscale(imgio.load_image(args.input))
    length = args.len if args.len == "auto" else int(args.len)
    params = pencil.SketchParams(
        n_directions=args.directions, kernel_len=length, stroke_width=args.width
    )
    imgio.save_image(pencil.pencil_sketch(img, params), args.output)


def _cmd_dataset(args):
    l0p = smooth.L0Params(lam=args.lam, kappa=args.kappa, beta_max=args.beta_max)
    sp = pencil.SketchParams()
    dataset.build_dataset(
        args.in_dir,
        args.out_dir,
        l0p=l0p,
        sp=sp,
        target=args.target,
        max_gradcount=args.max_complexity,
    )


def _make_bank(args):
    return feature.build_bank(
        seed=args.bank_seed,
        n_orient=args.orientations,
        layers=args.layers,
        channels_per_layer=args.channels,
    )


def _cmd_weights(args):
    names, images = _load_style_images(args.styles)
    shape = images[0].shape[:2]
    images = [imgio.resize(im, shape[1], shape[0]) for im in images]
    bank = _make_bank(args)
    feats = [feature.extract(im, bank) for im in images]
    table = asw.compute_asw(feats, theta=args.theta, tol=args.tol)
    payload = {
        "layers": table.n_layers,
        "styles": names,
        "omega": table.omega.tolist(),
        "omega_bar": table.omega_bar.tolist(),
        "pr": table.pr.tolist(),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _cmd_stylize(args):
    content = imgio.load_image(args.content)
    _, styles = _load_style_images(args.styles, size=content.shape[:2])
    bank = _make_bank(args)
    cfg = transfer.TransferConfig(
        alpha=args.alpha,
        beta=args.beta,
        lr=args.lr,
        iterations=args.iters,
        init=args.init,
        seed=args.seed,
    )
    content_features = None
    if args.features_from:
        content_features = feature.import_features(args.features_from)
    trace = [] if args.trace else None
    out = transfer.stylize(
        content,
        styles,
        cfg=cfg,
        bank=bank,
        theta=args.theta,
        tol=args.tol,
        content_features=content_features,
        trace=trace,
    )
    imgio.save_image(out, args.out)
    if trace is not None:
        trace_path = args.out + ".loss.csv"
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.write("iteration,loss\n")
            for i, value in enumerate(trace):
                fh.write(f"{i},{value!r}\n")


def _cmd_features_export(args):
    img = imgio.load_image(args.input)
    bank = _make_bank(args)
    feature.export_features(feature.extract(img, bank), args.output)


def _add_bank_flags(p):
    p.add_argument("--bank-seed", type=int, default=0, help="filter bank seed")
    p.add_argument("--layers", type=int, default=3, help="feature pyramid layers")
    p.add_argument("--channels", type=int, default=16, help="channels per layer")
    p.add_argument("--orientations", type=int, default=8, help="oriented kernels per layer")


def build_parser():
    parser = _Parser(
        prog="lineartist",
        description="Sketch extraction and adaptively weighted multi-style synthesis",
    )
    parser.add_argument(
        "--config",
        default=None,
        help="JSON file with flat keys mirroring flag names; flags override it",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("smooth", formatter_class=fmt, help="L0 gradient smoothing")
    p.add_argument("--lambda", dest="lam", type=float, default=0.02, help="smoothing weight")
    p.add_argument("--kappa", type=float, default=1.2, help="penalty growth factor")
    p.add_argument("--beta-max", type=float, default=1e5, help="penalty cap")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_smooth)

    p = sub.add_parser("canny", formatter_class=fmt, help="Canny edge extraction")
    p.add_argument("--sigma", type=float, default=1.4, help="Gaussian blur sigma")
    p.add_argument("--low", type=float, default=0.1, help="weak threshold fraction")
    p.add_argument("--high", type=float, default=0.2, help="strong threshold fraction")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_canny)

    p = sub.add_parser("sketch", formatter_class=fmt, help="pencil-stroke sketch")
    p.add_argument("--directions", type=int, default=8, help="stroke directions")
    p.add_argument("--len", default="auto", help="line kernel length or 'auto'")
    p.add_argument("--width", type=float, default=0.1, help="stroke width fraction")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_sketch)

    p = sub.add_parser("dataset", formatter_class=fmt, help="build training pairs")
    p.add_argument("--in", dest="in_dir", required=True, help="input image directory")
    p.add_argument("--out", dest="out_dir", required=True, help="output directory")
    p.add_argument("--target", type=int, default=256, help="output resolution")
    p.add_argument("--lambda", dest="lam", type=float, default=0.02, help="smoothing weight")
    p.add_argument("--kappa", type=float, default=1.2, help="penalty growth factor")
    p.add_argument("--beta-max", type=float, default=1e5, help="penalty cap")
    p.add_argument(
        "--max-complexity",
        type=float,
        default=None,
        help="skip images whose smoothed gradient density exceeds this",
    )
    p.set_defaults(func=_cmd_dataset)

    p = sub.add_parser("weights", formatter_class=fmt, help="adaptive style weights")
    p.add_argument("--styles", required=True, help="style image directory")
    p.add_argument("--theta", type=float, default=0.85, help="PageRank damping factor")
    p.add_argument("--tol", type=float, default=1e-4, help="PageRank convergence tolerance")
    p.add_argument("--out", required=True, help="output JSON path")
    _add_bank_flags(p)
    p.set_defaults(func=_cmd_weights)

    p = sub.add_parser("stylize", formatter_class=fmt, help="multi-style optimization")
    p.add_argument("--content", required=True, help="content image")
    p.add_argument("--styles", required=True, help="style image directory")
    p.add_argument("--alpha", type=float, default=8.0, help="content weight")
    p.add_argument("--beta", type=float, default=500.0, help="style weight")
    p.add_argument("--lr", type=float, default=1.0, help="Adam learning rate")
    p.add_argument("--iters", type=int, default=2000, help="optimization iterations")
    p.add_argument("--init", choices=("noise", "content"), default="noise", help="start image")
    p.add_argument("--seed", type=int, default=42, help="noise/bank RNG seed")
    p.add_argument("--theta", type=float, default=0.85, help="PageRank damping factor")
    p.add_argument("--tol", type=float, default=1e-4, help="PageRank convergence tolerance")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument(
        "--features-from",
        default=None,
        help="use content feature maps from this file instead of the built-in bank",
    )
    p.add_argument("--trace", action="store_true", help="write a loss-trace CSV beside the output")
    _add_bank_flags(p)
    p.set_defaults(func=_cmd_stylize)

    p = sub.add_parser(
        "features-export", formatter_class=fmt, help="export feature maps to a file"
    )
    p.add_argument("input")
    p.add_argument("output")
    _add_bank_flags(p)
    p.set_defaults(func=_cmd_features_export)

    return parser


def _apply_config(parser, argv):
    # Pull --config out first so its values become parser defaults that
    # explicit flags still override.
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if known.config:
        with open(known.config, "r", encoding="utf-8") as fh:
            values = json.load(fh)
        defaults = {k.replace("-", "_"): v for k, v in values.items()}
        parser.set_defaults(**defaults)
        # subparsers apply their own defaults after the parent, so the
        # config values must be installed on each of them as well
        for action in parser._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    sub.set_defaults(**defaults)


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except (CLIError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (imgio.ImageIOError, feature.FeatureFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (asw.ConvergenceError, transfer.NumericalError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
