import pytest

from factlens.errors import EmptyDocument
from factlens.extraction import extract_content
from support import FIXTURES


def test_simple_page_yields_two_sentences():
    doc = extract_content("<html><body><p>One. Two.</p></body></html>", "https://x.test/a")
    assert list(doc.sentences) == ["One.", "Two."]
    assert doc.url == "https://x.test/a"


def test_script_only_page_is_empty():
    with pytest.raises(EmptyDocument):
        extract_content("<html><body><script>var x = 1;</script></body></html>", "https://x.test/b")


def test_blank_body_is_empty():
    with pytest.raises(EmptyDocument):
        extract_content("   \n  ", "https://x.test/c")


def test_sample_news_page_has_42_sentences():
    html = (FIXTURES / "sample_news_page.html").read_text(encoding="utf-8")
    doc = extract_content(html, "https://www.example-news.com/harbor")
    assert len(doc.sentences) == 42
    assert doc.title == "Harbor district plan advances"


def test_boilerplate_is_stripped():
    html = (FIXTURES / "sample_news_page.html").read_text(encoding="utf-8")
    doc = extract_content(html, "https://www.example-news.com/harbor")
    joined = " ".join(doc.sentences)
    assert "Sign up" not in joined
    assert "Contact the newsroom" not in joined
    assert "trackPage" not in joined


def test_link_farm_blocks_dropped():
    html = (
        "<html><body>"
        "<div><a href='/1'>Click here now</a> <a href='/2'>More links here</a></div>"
        "<p>The committee approved the budget for next year after a long debate.</p>"
        "</body></html>"
    )
    doc = extract_content(html, "https://x.test/d")
    assert len(doc.sentences) == 1
    assert doc.sentences[0].startswith("The committee approved")


def test_plain_text_body_survives():
    doc = extract_content("Just a plain string with no markup at all.", "https://x.test/e")
    assert doc.sentences == ("Just a plain string with no markup at all.",)


def test_malformed_html_does_not_crash():
    doc = extract_content(
        "<p>Unclosed paragraph with <b>bold text that matters here", "https://x.test/f"
    )
    assert any("Unclosed paragraph" in s for s in doc.sentences)
