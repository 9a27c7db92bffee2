"""Writes the caption fixture and scores it with the reference COCO caption toolkit.

Needs pycocoevalcap (with its bundled jars) and a Java runtime on PATH:

    python3 tests/oracle/make_coco_oracle.py --pycoco-root /path/to/site-packages

Outputs tests/fixtures/coco_small.jsonl and tests/fixtures/coco_small_oracle.csv.
"""

import argparse
import json
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "fixtures")
sys.path.insert(0, HERE)

from coco_fixture_data import IMAGES  # noqa: E402


def records():
    for image_id, refs, cands in IMAGES:
        for k, cand in enumerate(cands):
            yield {
                "instance_id": f"{image_id}_c{k}",
                "image_id": image_id,
                "candidate": cand,
                "references": refs,
                "rating": None,
                "split": "unsplit",
            }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pycoco-root", default=None)
    args = ap.parse_args()
    if args.pycoco_root:
        sys.path.insert(0, args.pycoco_root)
        os.chdir(args.pycoco_root)

    from pycocoevalcap.bleu.bleu import Bleu
    from pycocoevalcap.cider.cider import Cider
    from pycocoevalcap.meteor.meteor import Meteor
    from pycocoevalcap.rouge.rouge import Rouge
    from pycocoevalcap.tokenizer.ptbtokenizer import PTBTokenizer

    recs = list(records())
    with open(os.path.join(FIXTURES, "coco_small.jsonl"), "w") as f:
        for r in recs:
            f.write(json.dumps(r) + "\n")

    gts = {r["instance_id"]: [{"caption": c} for c in r["references"]] for r in recs}
    res = {r["instance_id"]: [{"caption": r["candidate"]}] for r in recs}
    tok = PTBTokenizer()
    gts, res = tok.tokenize(gts), tok.tokenize(res)
    ids = [r["instance_id"] for r in recs]

    cols = {}
    _, bleu = Bleu(4).compute_score(gts, res)
    for n in range(4):
        cols[f"BLEU{n + 1}"] = bleu[n]
    cols["ROUGE"] = Rouge().compute_score(gts, res)[1]
    cols["CIDEr"] = Cider().compute_score(gts, res)[1]
    cols["METEOR"] = Meteor().compute_score(gts, res)[1]

    # The scorers iterate over dict keys; realign to `ids`.
    order = list(gts.keys())
    names = list(cols)
    with open(os.path.join(FIXTURES, "coco_small_oracle.csv"), "w") as f:
        f.write("# pycocoevalcap 1.2 scores for coco_small.jsonl (PTB tokenizer, Meteor 1.5 -l en -norm)\n")
        f.write("instance_id," + ",".join(names) + "\n")
        for iid in ids:
            k = order.index(iid)
            f.write(iid + "," + ",".join(repr(float(cols[n][k])) for n in names) + "\n")
    with open(os.path.join(FIXTURES, "coco_small_tokens.json"), "w") as f:
        json.dump({"candidates": {i: res[i][0] for i in ids},
                   "references": {i: gts[i] for i in ids}}, f, indent=1, sort_keys=True)


if __name__ == "__main__":
    main()
