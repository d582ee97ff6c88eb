#!/usr/bin/env python3
"""Regenerate the bundled replay fixtures, golden report, and golden metrics.

Runs the real pipeline in record mode against the scripted backend and
freezes the results under fixtures/.  Committed fixtures are the source of
truth for tests; rerun this only when the pipeline's request shapes change,
then review the diff.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from fake_backend import ScriptedBackend, make_page

from factlens.evaluation import load_dataset, predict_sentence_labels, run_eval
from factlens.model import PipelineConfig, RetrievalMode, canonical_json_bytes, canonical_serialize
from factlens.pipeline import run_verification
from factlens.providers import GatewayMode, ProviderGateway, ReplayStore
from factlens.segmentation import segment_text

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

JAVA_TEXT = (
    "Java tea is commonly used as a diuretic, meaning it may increase urine production. "
    "The property has led to its traditional use in managing conditions such as edema "
    "(swelling) and UTIs."
)

JAVA_SENTENCE_0 = (
    "Java tea is commonly used as a diuretic, meaning it may increase urine production."
)
JAVA_SENTENCE_1 = (
    "The property has led to its traditional use in managing conditions such as edema "
    "(swelling) and UTIs."
)

JAVA_CLAIMS = {
    JAVA_SENTENCE_0: [
        "Java tea is commonly used as a diuretic",
        "Java tea may increase urine production",
    ],
    JAVA_SENTENCE_1: [
        "Java tea is traditionally used to manage edema",
        "Edema is another word for swelling",
        "Java tea is traditionally used to manage urinary tract infections",
    ],
}

_TEA_FILLER = [
    "Java tea comes from the leaves of a plant grown across Southeast Asia.",
    "Harvesters pick the leaves by hand before drying them in shade.",
    "The brewed infusion has a mild, slightly bitter flavor.",
    "Regional growers host tasting events at the end of each season.",
    "Packaging standards vary between exporters and markets.",
    "Retail prices depend on leaf grade and harvest year.",
    "Cafe menus in the region list it alongside other herbal infusions.",
    "Storage guides recommend airtight tins away from sunlight.",
    "Trade journals track shipments through the major ports.",
]


def _tea_page(title: str, relevant: str, extra: list[str] | None = None) -> str:
    sentences = _TEA_FILLER[:4] + [relevant] + _TEA_FILLER[4:]
    if extra:
        sentences.extend(extra)
    return make_page(title, sentences)


def _java_search_table() -> dict[str, list[dict[str, str]]]:
    # Empty snippets: blocked fetches must drop evidence (not fall back) so
    # fault-injection runs stay within the recorded request set.
    def hit(url: str, title: str) -> dict[str, str]:
        return {"url": url, "title": title, "snippet": ""}

    return {
        "Java tea is commonly used as a diuretic": [
            hit("https://www.nih.gov/health/java-tea-diuretic", "Java tea as a diuretic"),
            hit("https://www.webmd.com/vitamins/java-tea-review", "Java tea review"),
            hit("https://www.blackteaworld.com/unflavored-guide", "Guide to unflavored teas"),
        ],
        "Java tea may increase urine production": [
            hit("https://en.wikipedia.org/wiki/Java_tea", "Java tea"),
            hit("https://javatea-lovers.blogspot.com/2023/05/benefits", "My java tea benefits"),
            hit("https://www.reuters.com/lifestyle/herbal-tea-trends", "Herbal tea trends"),
        ],
        "Java tea is traditionally used to manage edema": [
            hit("https://www.nih.gov/herbs/orthosiphon-traditional-uses", "Traditional uses"),
            hit("https://www.webmd.com/diet/java-tea-uses", "Java tea uses"),
            hit("https://en.wikipedia.org/wiki/Orthosiphon_aristatus", "Orthosiphon aristatus"),
        ],
        "Edema is another word for swelling": [
            hit("https://www.webmd.com/heart/edema-overview", "Edema overview"),
            hit("https://www.reuters.com/health/fluid-retention-explainer", "Fluid retention"),
            hit("https://javatea-lovers.blogspot.com/2023/07/tea-rituals", "Tea rituals"),
        ],
        "Java tea is traditionally used to manage urinary tract infections": [
            hit("https://en.wikipedia.org/wiki/Java_tea_uses", "Java tea uses"),
            hit("https://www.reddit.com/r/herbalism/comments/javatea", "r/herbalism on java tea"),
            hit("https://www.nih.gov/health/uti-herbal-remedies", "UTI herbal remedies"),
        ],
    }


def _java_pages() -> dict[str, str]:
    return {
        "https://www.nih.gov/health/java-tea-diuretic": _tea_page(
            "Java tea as a diuretic",
            "Clinical reviewers have confirmed that java tea is commonly used as a "
            "diuretic in traditional practice.",
        ),
        "https://www.webmd.com/vitamins/java-tea-review": _tea_page(
            "Java tea review",
            "A placebo-controlled trial disputed claims that java tea works as a "
            "reliable diuretic, finding no significant change in urine output.",
        ),
        "https://www.blackteaworld.com/unflavored-guide": make_page(
            "Guide to unflavored teas",
            [
                "Black tea remains the most widely consumed tea style worldwide.",
                "There's a lot of different types of unflavored black tea, and the "
                "type and where it's grown makes a big difference.",
                "Assam leaves brew a brisk, malty cup that stands up to milk.",
                "Darjeeling flushes are prized for their muscatel character.",
                "Ceylon gardens sit at elevations that shape the final flavor.",
                "Keemun offers a wine-like depth popular in breakfast blends.",
                "Storage in airtight tins preserves the leaf for many months.",
                "Water just off the boil extracts tannins quickly.",
                "Shorter steeps keep the cup smooth rather than astringent.",
            ],
        ),
        "https://en.wikipedia.org/wiki/Java_tea": _tea_page(
            "Java tea",
            "Pharmacological surveys have confirmed that java tea may increase urine "
            "production in animal models.",
        ),
        "https://javatea-lovers.blogspot.com/2023/05/benefits": _tea_page(
            "My java tea benefits",
            "After a decade of daily brewing, the reviews I trust have confirmed that "
            "java tea may increase urine production modestly.",
        ),
        "https://www.reuters.com/lifestyle/herbal-tea-trends": make_page(
            "Herbal tea trends",
            [
                "Herbal tea sales grew steadily across major markets this year.",
                "Cafes report growing demand for caffeine-free evening drinks.",
                "Suppliers are experimenting with new blends and seasonal flavors.",
                "Industry analysts expect the category to keep expanding.",
                "Packaging innovations focus on compostable materials.",
                "Retailers highlight provenance stories on their shelves.",
                "Trade shows this spring featured hundreds of herbal exhibitors.",
                "Export volumes from Southeast Asia reached a new high.",
                "Tasting panels noted a shift toward floral profiles.",
            ],
        ),
        "https://www.nih.gov/herbs/orthosiphon-traditional-uses": _tea_page(
            "Traditional uses",
            "Ethnobotanical records have confirmed that java tea is traditionally "
            "used to manage edema in Southeast Asia.",
        ),
        "https://www.webmd.com/diet/java-tea-uses": _tea_page(
            "Java tea uses",
            "Clinical handbooks have confirmed that java tea is traditionally used "
            "to manage edema and related fluid retention.",
        ),
        "https://en.wikipedia.org/wiki/Orthosiphon_aristatus": _tea_page(
            "Orthosiphon aristatus",
            "Regional pharmacopoeias have confirmed that java tea is traditionally "
            "used to manage edema.",
        ),
        "https://www.webmd.com/heart/edema-overview": _tea_page(
            "Edema overview",
            "Medical dictionaries have confirmed that edema is another word for "
            "swelling caused by excess fluid.",
        ),
        "https://www.reuters.com/health/fluid-retention-explainer": _tea_page(
            "Fluid retention",
            "Health explainers have confirmed that edema is another word for "
            "swelling in everyday usage.",
        ),
        "https://javatea-lovers.blogspot.com/2023/07/tea-rituals": make_page(
            "Tea rituals",
            [
                "My morning ritual starts with warming the pot twice.",
                "I keep a journal of every harvest I brew through the year.",
                "Guests always ask about the little clay cups on the shelf.",
                "The garden outside the kitchen window sets the mood.",
                "Slow pours make the whole house smell of leaves.",
                "Sunday sessions run long with board games and refills.",
                "A neighbor trades me honey for a tin of my favorite leaf.",
                "Rainy afternoons call for the darkest roast in the cupboard.",
                "The kettle I inherited from my grandmother still sings.",
            ],
        ),
        "https://en.wikipedia.org/wiki/Java_tea_uses": _tea_page(
            "Java tea uses",
            "Ethnographic studies have confirmed that java tea is traditionally "
            "used to manage urinary tract infections.",
        ),
        "https://www.reddit.com/r/herbalism/comments/javatea": make_page(
            "r/herbalism on java tea",
            [
                "Forum thread: what are people brewing this week?",
                "Anecdotal stories about herbal remedies fill most replies.",
                "One user posts photos of their windowsill herb garden.",
                "Another asks for kettle recommendations under fifty dollars.",
                "A mod reminds everyone to read the community wiki first.",
                "Someone shares a playlist they brew tea to every morning.",
                "Users swap jokes about oversteeped cups and bitter mornings.",
                "A long reply recounts a market visit from years ago.",
                "The thread ends with a poll about favorite mugs.",
            ],
        ),
        "https://www.nih.gov/health/uti-herbal-remedies": _tea_page(
            "UTI herbal remedies",
            "Traditional medicine compendia have confirmed that java tea is "
            "traditionally used to manage urinary tract infections.",
        ),
    }


def java_backend() -> ScriptedBackend:
    return ScriptedBackend(
        claims_table=JAVA_CLAIMS,
        search_table=_java_search_table(),
        pages=_java_pages(),
    )


def adversarial_backend() -> ScriptedBackend:
    """Same text, but every page for sentence 1's claims is blocked."""
    search = _java_search_table()
    blocked: set[str] = set()
    for query in (
        "Java tea is traditionally used to manage edema",
        "Edema is another word for swelling",
        "Java tea is traditionally used to manage urinary tract infections",
    ):
        replaced = []
        for i, host in enumerate(
            ["www.healtharchive.org", "www.wellness-digest.com", "research-hub.example.org"]
        ):
            url = f"https://{host}/blocked/{query.split()[-1].lower()}-{i + 1}"
            blocked.add(url)
            replaced.append({"url": url, "title": f"Blocked source {i + 1}", "snippet": ""})
        search[query] = replaced
    return ScriptedBackend(
        claims_table=JAVA_CLAIMS,
        search_table=search,
        pages=_java_pages(),
        blocked_urls=blocked,
    )


GREETING_TEXT = "Hello!"
DENSE_TEXT = "Green tea contains caffeine."

DENSE_CLAIMS = {DENSE_TEXT: ["Green tea contains caffeine"]}


def dense_backend() -> ScriptedBackend:
    query = "Green tea contains caffeine"

    def hit(url: str, title: str) -> dict[str, str]:
        return {"url": url, "title": title, "snippet": ""}

    pages = {
        "https://www.nih.gov/foods/green-tea-caffeine": _tea_page(
            "Green tea and caffeine",
            "Laboratory assays have confirmed that green tea contains caffeine in "
            "measurable amounts.",
        ),
        "https://en.wikipedia.org/wiki/Green_tea": _tea_page(
            "Green tea",
            "Composition tables have confirmed that green tea contains caffeine "
            "alongside catechins.",
        ),
        "https://coffeefans.blogspot.com/2024/01/alternatives": make_page(
            "Caffeine alternatives",
            [
                "This month I tried a week of mornings without my espresso machine.",
                "The first two days were rough, I will not pretend otherwise.",
                "A friend mailed me sampler tins from her favorite roastery.",
                "My notes compare how each cup paired with toast and jam.",
                "The cat remains unimpressed by every brewing gadget I own.",
                "Next month I plan to review travel kettles for camping trips.",
                "Several readers asked about my grinder settings, so stay tuned.",
                "The kitchen counter has never been this crowded with mugs.",
                "Thanks for reading and sharing your own morning routines.",
            ],
        ),
    }
    return ScriptedBackend(
        claims_table=DENSE_CLAIMS,
        search_table={
            query: [
                hit("https://www.nih.gov/foods/green-tea-caffeine", "Green tea and caffeine"),
                hit("https://en.wikipedia.org/wiki/Green_tea", "Green tea"),
                hit("https://coffeefans.blogspot.com/2024/01/alternatives", "Caffeine alternatives"),
            ]
        },
        pages=pages,
    )


EVAL_TEXTS = [
    ("r1", "alpha",
     "The Pacific Ocean is the largest ocean on Earth. It covers more than "
     "thirty percent of the planet's surface. Its deepest point is the "
     "Mariana Trench."),
    ("r2", "alpha",
     "Honey never spoils when stored properly. Archaeologists have found "
     "edible honey in ancient tombs."),
    ("r3", "alpha",
     "Mount Everest is the tallest mountain above sea level. Its summit "
     "stands at 8849 meters. Climbers first reached the top in 1953."),
    ("r4", "beta",
     "The Amazon River carries more water than any other river. It flows "
     "through South America."),
    ("r5", "beta",
     "Octopuses have three hearts. Two of the hearts pump blood to the "
     "gills. The third heart serves the rest of the body."),
    ("r6", "beta",
     "The Great Barrier Reef is the largest coral reef system. It is "
     "visible from space. It stretches over 2300 kilometers."),
]


def _record_gateway(path: Path, backend: ScriptedBackend) -> ProviderGateway:
    path.unlink(missing_ok=True)
    return ProviderGateway(
        mode=GatewayMode.RECORD, store=ReplayStore(path), transport=backend
    )


def build_golden() -> None:
    config = PipelineConfig()
    gateway = _record_gateway(FIXTURES / "golden.jsonl", java_backend())
    report = run_verification(JAVA_TEXT, config, gateway)
    (FIXTURES / "golden_input.txt").write_text(JAVA_TEXT + "\n", encoding="utf-8")
    (FIXTURES / "golden_config.json").write_text(
        json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (FIXTURES / "golden_report.json").write_bytes(canonical_serialize(report))
    scores = {i: str(s) for i, s in sorted(report.sentence_scores.items())}
    print(f"golden: {len(report.judgments)} judgments, scores={scores}, "
          f"overall={report.overall_score}")
    assert len(report.judgments) == 15, len(report.judgments)


def build_adversarial() -> None:
    config = PipelineConfig()
    gateway = _record_gateway(FIXTURES / "adversarial.jsonl", adversarial_backend())
    report = run_verification(JAVA_TEXT, config, gateway)
    statuses = {s.index: s.status.value for s in report.sentences}
    print(f"adversarial: statuses={statuses}")
    assert statuses[1] == "unverified", statuses
    assert 0 in report.sentence_scores and 1 not in report.sentence_scores


def build_greeting() -> None:
    backend = ScriptedBackend(claims_table={GREETING_TEXT: ["(no factual claims)"]})
    gateway = _record_gateway(FIXTURES / "greeting.jsonl", backend)
    report = run_verification(GREETING_TEXT, PipelineConfig(), gateway)
    assert report.sentences[0].status.value == "no_claims"
    print("greeting: no_claims recorded")


def build_dense() -> None:
    config = PipelineConfig(retrieval_mode=RetrievalMode.DENSE)
    gateway = _record_gateway(FIXTURES / "dense.jsonl", dense_backend())
    report = run_verification(DENSE_TEXT, config, gateway)
    print(f"dense: scores={dict(report.sentence_scores)}")
    assert report.sentence_scores, "dense run produced no scores"


def build_embeddings() -> None:
    """Standalone embedding fixtures for the dense-ranking unit tests."""
    backend = ScriptedBackend(generic=True)
    gateway = _record_gateway(FIXTURES / "embeddings.jsonl", backend)
    corpus = [
        "The museum reopened after a two-year renovation.",
        "Green tea contains caffeine.",
        "Local elections were held on Tuesday.",
        "The bridge spans nearly two kilometers.",
        "Chess engines evaluate millions of positions per second.",
    ]
    gateway.embed(["Green tea contains caffeine"] + corpus)
    # The identical-sentence probe used by the similarity tests.
    gateway.embed(["The bridge spans nearly two kilometers."] + corpus)
    print(f"embeddings: {len(ReplayStore(FIXTURES / 'embeddings.jsonl'))} entries")


def build_sample_page() -> None:
    """A committed news-style page whose extraction yields exactly 42 sentences."""
    from factlens.extraction import extract_content

    paragraphs = []
    for p in range(14):
        trio = [
            f"Paragraph {p + 1} opens with context about the harbor district development plan.",
            f"City planners presented revision {p + 1} of the proposal to residents on Thursday.",
            f"Public comments on round {p + 1} are due before the end of the month.",
        ]
        paragraphs.append("<p>" + " ".join(trio) + "</p>")
    html = (
        "<!DOCTYPE html><html><head><title>Harbor district plan advances</title>"
        "<script>trackPage();</script></head><body>"
        "<nav><a href='/'>Home</a><a href='/news'>News</a><a href='/sports'>Sports</a></nav>"
        "<article>" + "\n".join(paragraphs) + "</article>"
        "<aside><a href='/signup'>Sign up</a> <a href='/offers'>Offers</a></aside>"
        "<footer>Contact the newsroom. <a href='/terms'>Terms</a></footer>"
        "</body></html>"
    )
    (FIXTURES / "sample_news_page.html").write_text(html, encoding="utf-8")
    doc = extract_content(html, "https://www.example-news.com/harbor")
    print(f"sample page: {len(doc.sentences)} sentences")
    assert len(doc.sentences) == 42, len(doc.sentences)


def build_eval() -> None:
    base_config = PipelineConfig()
    backend = ScriptedBackend(claims_table={}, generic=True)

    # First pass: predictions at Ev=3 / Ctxt=15 seed the gold labels
    # (every third sentence flipped, so the metrics are non-degenerate).
    probe_path = FIXTURES / "eval.jsonl"
    gateway = _record_gateway(probe_path, backend)
    gold_rows = []
    flip = 0
    for record_id, subset, text in EVAL_TEXTS:
        report = run_verification(text, base_config, gateway)
        predictions = predict_sentence_labels(report)
        labels = []
        for p in predictions:
            flip += 1
            labels.append(p if flip % 7 else 1 - p)
        sentence_count = len(segment_text(text).sentences)
        assert sentence_count == len(labels)
        gold_rows.append(
            {"id": record_id, "subset": subset, "text": text, "gold_sentence_labels": labels}
        )
    dataset_path = FIXTURES / "eval_dataset.jsonl"
    with dataset_path.open("w", encoding="utf-8") as handle:
        for row in gold_rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")

    # Second pass: record the full sweep grid, then freeze its metrics.
    records = load_dataset(dataset_path)
    sweep = [(1, 15), (1, 30), (3, 15), (3, 30)]
    result = run_eval(records, base_config, gateway, sweep=sweep)
    (FIXTURES / "golden_metrics.json").write_bytes(canonical_json_bytes(result.to_tree()))
    for row in result.rows:
        overall = row.subsets["overall"]
        print(
            f"eval Ev={row.top_n_results} Ctxt={row.context_window_m}: "
            f"P={float(overall.precision):.3f} R={float(overall.recall):.3f} "
            f"F1={float(overall.f1):.3f}"
        )


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    build_golden()
    build_adversarial()
    build_greeting()
    build_dense()
    build_embeddings()
    build_sample_page()
    build_eval()
    print("fixtures rebuilt under", FIXTURES)


if __name__ == "__main__":
    main()
