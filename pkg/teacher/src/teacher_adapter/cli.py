"""teacher: train black-box models and serve them over the wire protocol."""

import argparse
import json
import sys

from .server import serve_oracle
from .training import TeacherSpec, train_teacher


def _load_spec(text):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            doc = json.load(fh)
    else:
        doc = json.loads(text)
    return TeacherSpec(kind=doc["kind"], seed=int(doc.get("seed", 0)))


def main(argv=None):
    parser = argparse.ArgumentParser(prog="teacher")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a teacher model on a labelled CSV")
    p.add_argument("--spec", required=True,
                   help='JSON like {"kind":"random-forest","seed":0}, or @file')
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="serve a saved model over the protocol")
    p.add_argument("--model", required=True)
    p.add_argument("--transport", default="stdio",
                   help="stdio (default) or tcp:PORT")

    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            acc = train_teacher(_load_spec(args.spec), args.data, args.out)
            print(f"training accuracy: {acc:.4f}")
        else:
            serve_oracle(args.model, args.transport)
        return 0
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
