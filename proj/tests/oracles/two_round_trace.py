"""Independent derivation of the scripted two-round episode trace.

Writes tests/golden/two_round_trace.jsonl. Run from the repository root:
    python3 tests/oracles/two_round_trace.py
"""

import itertools
import json
import math
import pathlib

DURATION = 100
GRID = list(range(0, DURATION + 1))
B, BS = 2, 1
CAPACITY = 3
TAU = 0.1
SCALE = 100.0

QUESTION = "What colour is the umbrella next to the parked car?"
OPTIONS = ["A. red", "B. blue", "C. green", "D. black"]
CONFIG = {
    "total_frames": B, "anchor_frames": BS, "tau_c": TAU, "reward_logit_scale": SCALE,
    "memory_capacity": CAPACITY, "retrieval_top_k": 10, "max_rounds": 8,
    "max_total_frames": 48, "seed": 0, "fusion": True, "query_update": True, "anchors": True,
    "retry_budget": 0,
}


def rnd(x):
    r = math.floor(x * 1e10 + 0.5) / 1e10
    return 0.0 if r == 0 else r


def fl(x):
    return rnd(float(x))


def coverage(seg, pre, total):
    """Brute-force minimax completion; earliest optimal set wins."""
    a, b = seg
    domain = [p for p in GRID if a <= p <= b]
    free = [p for p in domain if a < p < b and p not in pre]
    best = None
    for extra in itertools.combinations(free, min(len(free), total - len(pre))):
        frames = sorted(list(pre) + list(extra))
        radius = max(min(abs(p - f) for f in frames) for p in domain)
        if best is None or radius < best[1]:
            best = (frames, radius)
    return best


def entropy(values):
    if len(values) == 1:
        return 0.0
    if all(v == values[0] for v in values):
        return 1.0
    peak = max(values)
    e = [math.exp(SCALE * (v - peak)) for v in values]
    z = 0.0
    for x in e:
        z += x
    h = 0.0
    for x in e:
        p = x / z
        if p > 0:
            h -= p * math.log(p)
    return min(max(h / math.log(len(values)), 0.0), 1.0)


def u_score(seg, anchors):
    a, b = seg
    owned = [s for t, s in anchors if a <= t < b or (b == DURATION and t == b)]
    if not owned:
        return 0.0
    peak = max(owned)
    total = 0.0
    for s in owned:
        total += math.exp((s - peak) / TAU)
    return peak + TAU * math.log(total / len(owned))


def fuse(cands, H):
    out = []
    for c in cands:
        h = (1.0 - H) * c["r"] + H * c["u"]
        h = min(max(h, min(c["r"], c["u"])), max(c["r"], c["u"]))
        out.append(h)
    return out


def memory_json(entries):
    return [{"t": fl(t), "reward": rnd(r), "round": k} for t, r, k in entries]


def anchor_json(anchors, sources):
    return [{"t": fl(t), "similarity": rnd(s), "queries": [sources[t]]} for t, s in anchors]


def main():
    anchors = [(40, 0.8)]
    sources = {40: "red car parked", 52: "blue umbrella"}
    nodes = {0: (0, DURATION)}
    r_of, u_of, expl = {}, {}, {}
    memory = []
    lines = []

    lines.append({
        "type": "header", "schema": "vidsearch.trace", "version": 1,
        "video_id": "fixture-100", "duration": fl(DURATION), "question": QUESTION,
        "options": OPTIONS, "config": CONFIG, "initial_queries": ["red car parked"],
        "initial_anchors": anchor_json(anchors, sources), "degraded": False,
        "retries": 0, "warnings": [],
    })

    rounds = [
        dict(selected=0, scores=[50, 51, 50],
             texts=["Street scene, no car visible.", "A red car is parked at the kerb.",
                    "Empty street."],
             new_query=("blue umbrella", (52, 0.9)), response="{Segment: 2}"),
        dict(selected=2, scores=[51, 50, 51],
             texts=["The red car is still parked.", "Pedestrians pass by.",
                    "Someone holds a blue umbrella."],
             new_query=None, response="B"),
    ]
    candidates = []
    next_id = 1
    frames_seen = 0
    for number, plan in enumerate(rounds, start=1):
        sel = plan["selected"]
        a, b = nodes[sel]
        inside = sorted([x for x in anchors if a < x[0] < b], key=lambda x: (-x[1], x[0]))[:BS]
        pre = sorted(t for t, _ in inside)
        frames, radius = coverage((a, b), pre, B)
        frames_seen += len(frames)
        cuts = [a] + frames + [b]
        child_ids = []
        children = []
        for i in range(len(cuts) - 1):
            cid = next_id
            next_id += 1
            seg = (cuts[i], cuts[i + 1])
            nodes[cid] = seg
            child_ids.append(cid)
            atomic = not any(seg[0] < p < seg[1] for p in GRID)
            r_of[cid] = plan["scores"][i] / 100.0
            u_of[cid] = u_score(seg, anchors)
            expl[cid] = plan["texts"][i]
            children.append({"id": cid, "span": [fl(seg[0]), fl(seg[1])], "atomic": atomic,
                             "raw_score": plan["scores"][i], "r": rnd(r_of[cid]),
                             "defaulted": False, "explanation": expl[cid]})
            if not atomic:
                candidates.append(cid)
        candidates = [c for c in candidates if c != sel]
        candidates.sort(key=lambda c: nodes[c][0])
        H = entropy([r_of[c] for c in candidates])
        hs = fuse([{"r": r_of[c], "u": u_of[c]} for c in candidates], H)

        added = [(f, max(r_of[child_ids[i]], r_of[child_ids[i + 1]]), number)
                 for i, f in enumerate(frames)]
        for entry in added:
            memory.append(entry)
        evicted = []
        while len(memory) > CAPACITY:
            victim = min(memory, key=lambda e: (e[1], e[2], e[0]))
            memory.remove(victim)
            evicted.append(victim)
        memory.sort(key=lambda e: e[0])

        queries_added = []
        if plan["new_query"]:
            text, anchor = plan["new_query"]
            queries_added.append(text)
            anchors = sorted(anchors + [anchor])

        answer = plan["response"] == "B"
        action = ({"kind": "answer", "label": "B", "forced": False, "fallback": False} if answer
                  else {"kind": "explore", "node": 2, "forced": False, "fallback": False})
        lines.append({
            "type": "round", "round": number,
            "selected": {"id": sel, "span": [fl(a), fl(b)]},
            "frames": [{"t": fl(f), "source": "anchor" if f in pre else "coverage"} for f in frames],
            "radius": fl(radius),
            "children": children,
            "entropy": rnd(H),
            "weights": [rnd(1.0 - H), rnd(H)],
            "candidates": [{"id": c, "span": [fl(nodes[c][0]), fl(nodes[c][1])], "r": rnd(r_of[c]),
                            "u": rnd(u_of[c]), "h": rnd(h)} for c, h in zip(candidates, hs)],
            "memory": {"capacity": CAPACITY, "added": memory_json(added),
                       "evicted": memory_json(evicted), "after": memory_json(memory)},
            "queries_added": queries_added,
            "anchors": anchor_json(anchors, sources),
            "policy_responses": [plan["response"]],
            "action": action,
            "retries": 0,
            "warnings": [],
        })

    lines.append({"type": "result", "answer": "B", "rounds_used": 2,
                  "frames_observed": frames_seen, "termination": "policy_answered"})

    out = pathlib.Path(__file__).resolve().parents[1] / "golden" / "two_round_trace.jsonl"
    with open(out, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(json.dumps(line, separators=(",", ":"), ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
