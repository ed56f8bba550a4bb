"""Regenerates the ten-thread pipeline fixture. Output is deterministic."""
import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))

# id, event, label, created_at, text, keywords, reaction urls, dependency layout
# Layout: one relation per token in order; "root" marks the head of the tree.
THREADS = [
    ("552811386259386369", "charliehebdo", "true", "2015-01-09",
     "MORE: Massacre suspects believed to have taken hostage and holed up in small industrial town northeast of Paris: http://t.co/xq4GEpIcWL #CharlieHebdo",
     ["massacre", "suspects", "hostage", "town"], ["http://news.example/paris-massacre-suspects-hostage"], None),
    ("552790000000000002", "charliehebdo", "false", "2015-01-07",
     "Gunmen shouted slogans as they fled the magazine offices in Paris #CharlieHebdo",
     ["gunmen", "magazine", "offices", "paris"], ["http://wire.example/magazine-offices-gunmen"],
     ["nsubj", "root", "obj", "mark", "nsubj", "advcl", "det", "compound", "obj", "case", "obl"]),
    ("544274934835707905", "sydneysiege", "false", "2014-12-15",
     "Hostages seen holding black flag in window of Sydney cafe #sydneysiege",
     ["hostages", "flag", "window", "cafe"], ["http://daily.example/sydney-cafe-flag-window"],
     ["nsubj:pass", "root", "xcomp", "amod", "obj", "case", "obl", "case", "compound", "nmod"]),
    ("544290000000000004", "sydneysiege", "true", "2014-12-16",
     "Police confirm gunman dead as Sydney cafe siege ends #sydneysiege",
     ["police", "gunman", "siege", "cafe"], ["http://daily.example/police-confirm-siege-ends"],
     ["nsubj", "root", "nsubj", "xcomp", "mark", "compound", "compound", "nsubj", "advcl"]),
    ("500000000000000005", "ferguson", "true", "2014-08-10",
     "Police officer shot unarmed teenager in Ferguson Missouri #Ferguson",
     ["officer", "teenager", "unarmed", "missouri"], ["http://metro.example/officer-shot-unarmed-teenager"],
     ["compound", "nsubj", "root", "amod", "obj", "case", "compound", "obl"]),
    ("500000000000000006", "ferguson", "unverified", "2014-08-20",
     "Ferguson police chief to resign after protests #Ferguson",
     ["chief", "resign", "protests", "ferguson"], [],
     ["compound", "compound", "nsubj", "mark", "root", "case", "obl"]),
    ("524900000000000007", "ottawashooting", "true", "2014-10-22",
     "Soldier shot at National War Memorial in Ottawa #OttawaShooting",
     ["soldier", "memorial", "war", "ottawa"], ["http://capital.example/soldier-shot-war-memorial"],
     ["nsubj:pass", "root", "case", "compound", "compound", "obl", "case", "nmod"]),
    ("524900000000000008", "ottawashooting", "false", "2014-10-22",
     "Second gunman reported at Rideau Centre shopping mall #OttawaShooting",
     ["gunman", "rideau", "shopping", "mall"], ["http://capital.example/rideau-centre-gunman-report"],
     ["amod", "nsubj:pass", "root", "case", "compound", "compound", "compound", "obl"]),
    ("580300000000000009", "germanwings-crash", "true", "2015-03-24",
     "Germanwings plane crashed in French Alps with 150 people on board #Germanwings",
     ["plane", "crashed", "alps", "people"], ["http://air.example/germanwings-plane-crashed-alps"],
     ["compound", "nsubj", "root", "case", "amod", "obl", "case", "nummod", "obl", "case", "nmod"]),
    ("580320612155060224", "germanwings-crash", "unverified", "2015-03-26",
     "Co-pilot locked captain out of cockpit before crash #Germanwings",
     ["pilot", "captain", "cockpit", "crash"], ["http://air.example/captain-locked-out-cockpit"],
     ["nsubj", "root", "obj", "case", "case", "obl", "case", "obl"]),
]

TEMPLATES = [
    "Officials said the {0} and the {1} were at the centre of the investigation on Friday.",
    "Witnesses told reporters that the {2} had been seen near the {3} earlier that day.",
    "Authorities confirmed that the {1} linked to the {0} remained under close watch.",
    "Local media reported that the {3} was sealed off while the {2} was examined.",
    "Several accounts of the {0} and the {2} could not be independently verified by journalists.",
    "A spokesperson declined to comment further on the {1} or the {3} at this stage.",
    "Residents near the {3} described a tense atmosphere as news of the {0} spread.",
]

DECOYS = [
    ("http://sport.example/league-final-report", "League final ends in dramatic penalty shootout",
     ["The league final was decided by a penalty shootout after extra time in front of a record crowd.",
      "Fans celebrated long into the night after the winning penalty was scored by the captain."]),
    ("http://food.example/winter-recipes", "Ten warming recipes for the winter season",
     ["These recipes use simple ingredients and can be prepared in under an hour on busy weeknights.",
      "Slow cooked stews remain the most popular choice among readers during the colder months."]),
    ("http://weather.example/storm-warning", "Storm warning issued for the coast",
     ["Forecasters issued a storm warning for coastal areas with strong winds expected overnight.",
      "Residents were advised to secure loose objects and avoid unnecessary travel on the roads."]),
]


UPOS = {"root": "VERB", "advcl": "VERB", "xcomp": "VERB", "case": "ADP", "mark": "PART", "det": "DET",
        "amod": "ADJ", "nummod": "NUM"}


def parse_rows(layout, text):
    words = [w for w in text.replace(":", " ").split() if not w.startswith("#") and not w.startswith("http")]
    assert len(words) == len(layout), (text, words)
    root = layout.index("root") + 1
    rows = []
    for i, (word, rel) in enumerate(zip(words, layout), start=1):
        if rel == "root":
            head = 0
        elif rel in ("compound", "amod", "nummod"):
            head = i + 1
            while layout[head - 1] in ("compound", "amod", "nummod"):
                head += 1
        else:
            head = root
        upos = UPOS.get(rel.split(":")[0], "NOUN")
        rows.append(f"{i}\t{word}\t{word.lower()}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_")
    return rows


def main():
    rng = random.Random(7)
    threads, docs, conllu = [], [], []
    example = open(os.path.join(HERE, "..", "worked_example", "parse.conllu")).read().strip()
    conllu.append(example)
    for tid, event, label, date, text, keys, reaction_urls, layout in THREADS:
        source = {"id": tid, "text": text, "created_at": date, "event": event, "author_handle": "newsdesk"}
        reactions = [{"id": f"{tid[:-3]}{900 + k}", "text": f"@newsdesk is this confirmed? {u}", "created_at": date,
                      "event": event, "author_handle": f"reader{k}"} for k, u in enumerate(reaction_urls)]
        threads.append({"source": source, "reactions": reactions, "reaction_urls": reaction_urls,
                        "label": label, "event": event})
        if layout:
            conllu.append("\n".join([f"# sent_id = {tid}", f"# text = {text}"] + parse_rows(layout, text)))
        year, month, day = map(int, date.split("-"))
        n_docs = 1 if tid.endswith("06") else 4
        for d in range(n_docs):
            order = TEMPLATES[:]
            rng.shuffle(order)
            sentences = [t.format(*keys) for t in order[: 4 if n_docs > 1 else 2]]
            url = reaction_urls[0] if (d == 0 and reaction_urls) else f"http://news{d}.example/{tid}/{'-'.join(keys[d % 4:] + keys[:d % 4])}"
            docs.append({"url": url, "title": f"{keys[0].capitalize()} {keys[1]} latest", "paragraphs":
                         [" ".join(sentences[:2]), " ".join(sentences[2:])],
                         "publish_date": f"{year:04d}-{month:02d}-{max(day - 1 - d % 2, 1):02d}"})
        docs.append({"url": f"http://late.example/{tid}", "title": f"{keys[0].capitalize()} aftermath",
                     "paragraphs": [TEMPLATES[0].format(*keys)], "publish_date": f"{year:04d}-{month:02d}-{day:02d}"})
        docs.append({"url": f"http://blank.example/{tid}", "title": "", "paragraphs": [TEMPLATES[1].format(*keys)],
                     "publish_date": f"{year:04d}-{month:02d}-{max(day - 1, 1):02d}"})
    for url, title, paras in DECOYS:
        docs.append({"url": url, "title": title, "paragraphs": paras, "publish_date": "2014-06-01"})

    with open(os.path.join(HERE, "threads.jsonl"), "w") as f:
        for t in threads:
            f.write(json.dumps(t) + "\n")
    with open(os.path.join(HERE, "docs.jsonl"), "w") as f:
        for d in docs:
            f.write(json.dumps(d) + "\n")
    with open(os.path.join(HERE, "parses.conllu"), "w") as f:
        f.write("\n\n".join(conllu) + "\n")

    vocab = set()
    for d in docs:
        for chunk in [d["title"], d["url"]] + d["paragraphs"]:
            for w in "".join(c.lower() if c.isalpha() else " " for c in chunk).split():
                vocab.add(w)
    for t in threads:
        for w in "".join(c.lower() if c.isalpha() else " " for c in t["source"]["text"]).split():
            vocab.add(w)
    topics = {}
    for _, event, *_rest in THREADS:
        topics.setdefault(event, len(topics))
    topic_of = {}
    for tid, event, _, _, text, keys, *_ in THREADS:
        for w in keys + [w.lower() for w in text.split() if w.isalpha()]:
            topic_of.setdefault(w.lower(), topics[event])
    with open(os.path.join(HERE, "embeddings.txt"), "w") as f:
        for w in sorted(vocab):
            v = [rng.gauss(0, 0.3) for _ in range(12)]
            if w in topic_of:
                v[topic_of[w]] += 1.0
                v[11] += 0.8
            else:
                v[5 + len(w) % 6] += 0.6
            f.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")


if __name__ == "__main__":
    main()
