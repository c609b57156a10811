import pytest
from hypothesis import given, strategies as st

from approxgram.textmodel import (
    AnnotationError,
    ProbeSpan,
    gap_chars,
    parse_annotated_document,
    tokenize,
)


def surfaces(text):
    return [t.surface for t in tokenize(text)]


class TestTokenize:
    def test_trailing_punctuation_split(self):
        assert surfaces("made a duck.") == ["made", "a", "duck", "."]

    def test_empty(self):
        assert tokenize("") == []

    def test_offsets_hand_counted(self):
        toks = tokenize("Old Trafford")
        assert [(t.surface, t.char_start, t.char_end) for t in toks] == [("Old", 0, 3), ("Trafford", 4, 12)]

    def test_leading_and_trailing_punctuation(self):
        assert surfaces('("hit,")') == ["(", '"', "hit", ",", '"', ")"]

    def test_inner_punctuation_kept(self):
        assert surfaces("B.A. 6-wicket") == ["B.A", ".", "6-wicket"]


class TestParseAnnotated:
    def test_atomic_string_example(self):
        doc = parse_annotated_document("<name>Kapil Dev</name> bowled <balls>5</balls>")
        assert doc.raw_text == "Kapil Dev bowled 5"
        assert [(p.category, p.confidence, p.char_range) for p in doc.probes] == [
            ("name", 1.0, (0, 9)),
            ("balls", 1.0, (17, 18)),
        ]
        assert doc.gold == ()

    def test_empty(self):
        doc = parse_annotated_document("")
        assert doc.tokens == () and doc.probes == () and doc.gold == ()

    def test_gold_span(self):
        doc = parse_annotated_document("<IMP><name>Dravid</name> hit <runs>67 runs</runs> in the match</IMP>.")
        assert len(doc.probes) == 2
        assert len(doc.gold) == 1
        assert doc.gold[0].probe_sequence == ("name", "runs")
        assert doc.text(doc.gold[0].char_range) == "Dravid hit 67 runs in the match"

    def test_confidence_attribute(self):
        doc = parse_annotated_document('<runs conf="0.25">67</runs>')
        assert doc.probes[0].confidence == 0.25

    def test_padded_probe_content_is_trimmed(self):
        doc = parse_annotated_document("<name> Sachin Tendulkar </name> made")
        assert doc.text(doc.probes[0].char_range) == "Sachin Tendulkar"
        assert doc.probes[0].token_range == (0, 1)

    def test_escapes(self):
        doc = parse_annotated_document("<team>A &amp; B</team> &lt;3")
        assert doc.raw_text == "A & B <3"
        assert doc.text(doc.probes[0].char_range) == "A & B"

    def test_nested_probes_are_alternative_readings(self):
        doc = parse_annotated_document("<name><degree>B.A</degree>. Ambedkar</name> is honored")
        assert sorted(p.category for p in doc.probes) == ["degree", "name"]

    @pytest.mark.parametrize(
        "source",
        [
            "<name>Dravid",
            "Dravid</name>",
            "<name>a <runs>b</name> c</runs>",
            "<IMP><IMP>x</IMP></IMP>",
        ],
    )
    def test_bad_nesting_names_tag_and_offset(self, source):
        with pytest.raises(AnnotationError) as err:
            parse_annotated_document(source)
        assert err.value.tag is not None
        assert err.value.offset is not None

    @pytest.mark.parametrize("conf", ["1.5", "-0.1", "abc"])
    def test_bad_confidence(self, conf):
        with pytest.raises(AnnotationError):
            parse_annotated_document(f'<runs conf="{conf}">5</runs>')

    def test_probe_span_validates_confidence(self):
        with pytest.raises(ValueError):
            ProbeSpan("runs", 1.2, (0, 0), (0, 1))

    def test_gold_probe_sequence_invariant(self):
        doc = parse_annotated_document("<a>x</a> <IMP><b>y</b> z <c>w</c></IMP> <a>v</a>")
        gs, ge = doc.gold[0].char_range
        inside = [p.category for p in doc.probes if gs <= p.char_range[0] and p.char_range[1] <= ge]
        assert doc.gold[0].probe_sequence == tuple(inside) == ("b", "c")


class TestGapChars:
    CALCUTTA = "<name> Sachin Tendulkar </name> made <runs> a duck </runs>. Hope he does well in <location> Calcutta </location>."

    def test_calcutta_gap_is_22(self):
        doc = parse_annotated_document(self.CALCUTTA)
        runs = next(p for p in doc.probes if p.category == "runs")
        loc = next(p for p in doc.probes if p.category == "location")
        assert doc.raw_text[runs.char_range[1]:loc.char_range[0]].strip() == ". Hope he does well in"
        assert gap_chars(doc, runs.char_range[1], loc.char_range[0]) == 22

    def test_empty_gap(self):
        doc = parse_annotated_document("abc")
        assert gap_chars(doc, 1, 1) == 0

    def test_padded_word(self):
        doc = parse_annotated_document("x made y")
        assert gap_chars(doc, 1, 7) == 4  # " made "

    @pytest.mark.parametrize("lo,hi", [(-1, 2), (2, 1), (0, 99)])
    def test_out_of_range(self, lo, hi):
        doc = parse_annotated_document("abc")
        with pytest.raises(IndexError):
            gap_chars(doc, lo, hi)


plain_text = st.text(alphabet=st.sampled_from(list("ab xy.,;:!?\"'()\n\t-")), max_size=60)


@given(plain_text)
def test_tokenize_round_trip(text):
    toks = tokenize(text)
    rebuilt, pos = [], 0
    for t in toks:
        rebuilt.append(text[pos:t.char_start])
        assert text[t.char_start:t.char_end] == t.surface
        rebuilt.append(t.surface)
        pos = t.char_end
    rebuilt.append(text[pos:])
    assert "".join(rebuilt) == text
    for a, b in zip(toks, toks[1:]):
        assert a.char_end <= b.char_start
    assert all(t.char_start < t.char_end for t in toks)


words = st.sampled_from(["Dravid", "hit", "67", "runs", "in", "the", "match", ".", ","])


@st.composite
def markup(draw):
    parts = []
    for _ in range(draw(st.integers(0, 8))):
        w = draw(words)
        if draw(st.booleans()):
            cat = draw(st.sampled_from(["name", "runs"]))
            conf = draw(st.sampled_from(["", ' conf="0.5"']))
            w = f"<{cat}{conf}>{w}</{cat}>"
        parts.append(w)
    body = " ".join(parts)
    return f"<IMP>{body}</IMP>" if draw(st.booleans()) and body else body


@given(markup())
def test_parse_idempotent_in_content(source):
    doc = parse_annotated_document(source)
    again = parse_annotated_document(doc.raw_text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
    assert again.raw_text == doc.raw_text
    assert again.probes == ()
    assert [(t.surface, t.char_start, t.char_end) for t in again.tokens] == [
        (t.surface, t.char_start, t.char_end) for t in doc.tokens
    ]


@given(markup())
def test_probe_ranges_in_bounds(source):
    doc = parse_annotated_document(source)
    for p in doc.probes:
        assert 0 <= p.char_range[0] < p.char_range[1] <= len(doc.raw_text)
        assert 0 <= p.confidence <= 1


@given(
    st.text(alphabet="ab .", max_size=30),
    st.data(),
)
def test_gap_chars_monotone(text, data):
    doc = parse_annotated_document(text)
    n = len(text)
    lo = data.draw(st.integers(0, n))
    hi = data.draw(st.integers(lo, n))
    base = gap_chars(doc, lo, hi)
    # widen outward past non-whitespace characters only
    new_lo, new_hi = lo, hi
    while new_lo > 0 and not text[new_lo - 1].isspace() and data.draw(st.booleans()):
        new_lo -= 1
    while new_hi < n and not text[new_hi].isspace() and data.draw(st.booleans()):
        new_hi += 1
    assert gap_chars(doc, new_lo, new_hi) >= base
