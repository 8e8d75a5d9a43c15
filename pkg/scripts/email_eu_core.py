"""Score the SDP on the two largest departments of the email-Eu-core graph.

Either pass --data-dir with email-Eu-core.txt and
email-Eu-core-department-labels.txt, or --fetch to download them from SNAP
(needs network access).
"""

import argparse
import gzip
import json
import sys
import urllib.request
from pathlib import Path

from lsmrecovery import harness

BASE = "https://snap.stanford.edu/data/"
FILES = ("email-Eu-core.txt", "email-Eu-core-department-labels.txt")


def fetch(dest: Path):
    dest.mkdir(parents=True, exist_ok=True)
    for name in FILES:
        target = dest / name
        if target.exists():
            continue
        with urllib.request.urlopen(BASE + name + ".gz", timeout=60) as resp:
            target.write_bytes(gzip.decompress(resp.read()))
        print(f"downloaded {target}", file=sys.stderr)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-dir", default="data/email-Eu-core")
    ap.add_argument("--fetch", action="store_true")
    args = ap.parse_args()
    root = Path(args.data_dir)
    if args.fetch:
        fetch(root)
    edges, labels = (root / f for f in FILES)
    if not edges.exists() or not labels.exists():
        sys.exit(f"missing {edges} or {labels}; rerun with --fetch or point --data-dir at them")

    graph = harness.ingest_edge_list(edges, labels)
    sub, truth, sizes = harness.two_largest_clusters(graph)
    res = harness.score_real(sub.adjacency, truth)
    print(json.dumps(res.to_dict(), indent=2))


if __name__ == "__main__":
    main()
