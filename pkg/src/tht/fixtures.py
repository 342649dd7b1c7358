"""Sample corpus: the two worked KV passages with their commentary evidence.

The passage on 1.1.1 carries two commentaries (Ny, Pm); across the first two
sections there are 25 base-text words of which Ny supports 24 and Pm 12, and
the third section has evidence from neither while a manuscript attests it.
The passage on 2.1.22 carries Ny with the sub-commentary Tp under it: Ny
supports 9 words of the first two sections, Tp exactly 1 of those 9, and the
third section again goes unsupported.
"""

from __future__ import annotations

from .collation import tokenize
from .store import Store

ACTOR = "fixture"

KV_1_1_1_SUTRA = "वृद्धिः आत् ऐच्"

# 19 tokens once brackets are stripped as separators.
KV_1_1_1_1_TEXT = (
    "वृद्धिः सञ्ज्ञात्वेन [विधीयते] प्रत्येकम् आदैचाम् वर्णानाम् सामान्येन "
    "तद्भावितानाम् [अतद्भावितानाम्] च तपरकरणम् [ऐजर्थम्] तात् अपि परः तपरः "
    "इति खट्वैडकादिषु [त्रिमात्रचतुर्मात्रप्रसङ्गनिवृत्तये]"
)

# 6 tokens.
KV_1_1_1_2_TEXT = "आश्वलायनः ऐतिकायनः औपगवः औपमन्यवः शालीयः मालीयः"

# 6 tokens.
KV_1_1_1_3_TEXT = "वृद्धिप्रदेशाः सिचि वृद्धिः परस्मैपदेषु इति एवमादयः"

KV_2_1_22_SUTRA = "तत्पुरुषः"

# 11 tokens.
KV_2_1_22_1_TEXT = (
    "तत्पुरुषः इति संज्ञा ऽधिक्रियते प्राग् बहुव्रीहेः। "
    "यानित ऊर्ध्वम् अनुक्रमिष्यामः, तत्पुरुषसंज्ञास्ते वेदितव्याः।"
)

# 14 tokens.
KV_2_1_22_2_TEXT = (
    "वक्ष्यति, द्वितीय श्रितातीतपतित इति। कष्टश्रितः। पूर्वाचार्यसंज्ञा चेयं "
    "महती, तदङ्गीकरणौपाधेरपि तदीयस्य परिग्रहार्थम्, उत्तरपदार्थप्रधानस् "
    "तत्पुरुषः इति।"
)

# 6 tokens.
KV_2_1_22_3_TEXT = "तत्पुरुषप्रदेशाः तत्पुरुषे कृति बहुलम् इत्येवम् आदयः।"

NY_FILLER = "वृद्धिशब्दः संज्ञात्वेन विधीयते इति न्यासकारः व्याचष्टे"
PM_FILLER = "तपरकरणस्य प्रयोजनम् इह पदमञ्जर्यां विचार्यते"
TP_FILLER = "तत्पुरुष इति प्रत्याख्यानम् अत्र तन्त्रप्रदीपे स्पष्टम्"

# Variant readings of 1.1.1.2 for three collation witnesses. Relative to A
# (the base text), B differs in tokens 0-1, C in tokens 1-4 but agreeing with
# B on token 1, giving pairwise raw distances 2 / 4 / 4 over 6 tokens.
READING_B_1_1_1_2 = "अश्वलायनः एतिकायनः औपगवः औपमन्यवः शालीयः मालीयः"
READING_C_1_1_1_2 = "आश्वलायनः एतिकायनः उपगवः उपमन्यवः सालीयः मालीयः"


def _span_quote(base_text: str, start: int, end: int) -> str:
    return " ".join(tokenize(base_text).tokens[start:end])


def build_kv_1_1_1(store: Store) -> None:
    """KV work plus the 1.1.1 passage, its Ny/Pm evidence, and one manuscript."""
    store.create_work("KV", "Kāśikāvṛtti", "Deva", actor=ACTOR)
    store.add_unit("KV", "1.1.1", "Sutra", KV_1_1_1_SUTRA, actor=ACTOR)
    store.add_unit("KV", "1.1.1.1", "IntroductionMeaning", KV_1_1_1_1_TEXT, actor=ACTOR)
    store.add_unit("KV", "1.1.1.2", "Examples", KV_1_1_1_2_TEXT, actor=ACTOR)
    store.add_unit("KV", "1.1.1.3", "OtherOccurrences", KV_1_1_1_3_TEXT, actor=ACTOR)

    store.add_layer("KV/1.1.1", "Ny", NY_FILLER, actor=ACTOR)
    store.add_layer("KV/1.1.1", "Pm", PM_FILLER, actor=ACTOR)

    # Ny covers 24 of the 25 words of sections .1-.2: everything except the
    # last word of .1 (token 18). Overlapping spans exercise union counting.
    store.annotate("KV/1.1.1/Ny", "1.1.1.1", 0, 10, "Direct",
                   subtype="full-quotation",
                   quoted_form=_span_quote(KV_1_1_1_1_TEXT, 0, 10), actor=ACTOR)
    store.annotate("KV/1.1.1/Ny", "1.1.1.1", 9, 18, "Direct",
                   subtype="full-quotation",
                   quoted_form=_span_quote(KV_1_1_1_1_TEXT, 9, 18), actor=ACTOR)
    store.annotate("KV/1.1.1/Ny", "1.1.1.2", 0, 6, "Direct",
                   subtype="full-quotation",
                   quoted_form=_span_quote(KV_1_1_1_2_TEXT, 0, 6), actor=ACTOR)

    # Pm covers 12: the first six words of each of .1 and .2.
    store.annotate("KV/1.1.1/Pm", "1.1.1.1", 0, 6, "Indirect",
                   subtype="paraphrase", actor=ACTOR)
    store.annotate("KV/1.1.1/Pm", "1.1.1.2", 0, 6, "Direct",
                   subtype="pratīka",
                   quoted_form=_span_quote(KV_1_1_1_2_TEXT, 0, 6), actor=ACTOR)

    store.add_witness("ms-A", "A", "Manuscript", actor=ACTOR)
    for unit_id, text in [("1.1.1", KV_1_1_1_SUTRA),
                          ("1.1.1.1", KV_1_1_1_1_TEXT),
                          ("1.1.1.2", KV_1_1_1_2_TEXT),
                          ("1.1.1.3", KV_1_1_1_3_TEXT)]:
        store.record_reading(unit_id, "ms-A", text, actor=ACTOR, work_id="KV")


def build_kv_2_1_22(store: Store) -> None:
    """The 2.1.22 passage with Ny and its sub-commentary Tp. Assumes the KV
    work and witness ms-A already exist."""
    store.add_unit("KV", "2.1.22", "Sutra", KV_2_1_22_SUTRA, actor=ACTOR)
    store.add_unit("KV", "2.1.22.1", "IntroductionMeaning", KV_2_1_22_1_TEXT, actor=ACTOR)
    store.add_unit("KV", "2.1.22.2", "Examples", KV_2_1_22_2_TEXT, actor=ACTOR)
    store.add_unit("KV", "2.1.22.3", "OtherOccurrences", KV_2_1_22_3_TEXT, actor=ACTOR)

    store.add_layer("KV/2.1.22", "Ny", NY_FILLER, actor=ACTOR)
    store.add_layer("KV/2.1.22/Ny", "Tp", TP_FILLER, actor=ACTOR)

    # Ny supports 9 words across .1-.2.
    store.annotate("KV/2.1.22/Ny", "2.1.22.1", 0, 6, "Direct",
                   subtype="full-quotation",
                   quoted_form=_span_quote(KV_2_1_22_1_TEXT, 0, 6), actor=ACTOR)
    store.annotate("KV/2.1.22/Ny", "2.1.22.2", 0, 3, "Indirect",
                   subtype="gloss", actor=ACTOR)

    # Tp supports exactly one of those nine: the sutra word itself.
    store.annotate("KV/2.1.22/Ny/Tp", "2.1.22.1", 0, 1, "Direct",
                   subtype="pratīka",
                   quoted_form=_span_quote(KV_2_1_22_1_TEXT, 0, 1), actor=ACTOR)

    for unit_id, text in [("2.1.22", KV_2_1_22_SUTRA),
                          ("2.1.22.1", KV_2_1_22_1_TEXT),
                          ("2.1.22.2", KV_2_1_22_2_TEXT),
                          ("2.1.22.3", KV_2_1_22_3_TEXT)]:
        store.record_reading(unit_id, "ms-A", text, actor=ACTOR, work_id="KV")


def add_collation_witnesses(store: Store) -> None:
    """Two more manuscripts with variant readings of 1.1.1.2, giving the
    witness triple A/B/C pairwise normalized distances 1/3, 2/3, 2/3."""
    store.add_witness("ms-B", "B", "Manuscript", actor=ACTOR)
    store.add_witness("ms-C", "C", "Manuscript", actor=ACTOR)
    store.record_reading("1.1.1.2", "ms-B", READING_B_1_1_1_2,
                         actor=ACTOR, work_id="KV")
    store.record_reading("1.1.1.2", "ms-C", READING_C_1_1_1_2,
                         actor=ACTOR, work_id="KV")


def build_kv_corpus(store: Store, with_collation_witnesses: bool = False) -> None:
    build_kv_1_1_1(store)
    build_kv_2_1_22(store)
    if with_collation_witnesses:
        add_collation_witnesses(store)
