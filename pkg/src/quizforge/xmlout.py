"""Moodle XML question-bank emission.

The element set is the minimal one Moodle 4.x imports: a leading category
question, then one cloze question per instance. Output formatting is fully
fixed (LF line endings, two-space indent, stable attribute order) so the
same inputs always give byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

from . import cloze
from .template import QuizInstance, QuizTemplate, instantiate_batch

DEFAULT_PENALTY = "0.3333333"


class XmlOutError(ValueError):
    pass


@dataclass(frozen=True)
class QuestionBank:
    category_path: str
    questions: tuple
    penalty: str = DEFAULT_PENALTY

    def __post_init__(self):
        if not self.questions:
            raise XmlOutError("question bank needs at least one question")
        if not self.category_path.strip():
            raise XmlOutError("category path must be nonempty")
        object.__setattr__(self, "questions", tuple(self.questions))


def _xml_escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def _cdata(text: str) -> str:
    # a literal ]]> may never appear inside a CDATA section; split it
    return "<![CDATA[" + text.replace("]]>", "]]]]><![CDATA[>") + "]]>"


def _category_text(category_path: str) -> str:
    parts = [p.strip() for p in category_path.split("/")]
    return "$course$/top/" + "/".join(parts)


def emit_xml(bank: QuestionBank) -> str:
    """Serialize a bank to Moodle import XML (UTF-8 text, LF endings)."""
    for inst in bank.questions:
        try:
            _, subs = cloze.parse_cloze(inst.qtxt)
        except cloze.ClozeError as e:
            raise XmlOutError(f"invalid CLOZE in {inst.quizname!r}: {e}") from None
    out = ['<?xml version="1.0" encoding="UTF-8"?>', "<quiz>"]
    out.append('  <question type="category">')
    out.append("    <category>")
    out.append(f"      <text>{_xml_escape(_category_text(bank.category_path))}</text>")
    out.append("    </category>")
    out.append("  </question>")
    for inst in bank.questions:
        out.append('  <question type="cloze">')
        out.append("    <name>")
        out.append(f"      <text>{_xml_escape(inst.quizname)}</text>")
        out.append("    </name>")
        out.append('    <questiontext format="html">')
        out.append(f"      <text>{_cdata(inst.qtxt)}</text>")
        out.append("    </questiontext>")
        out.append('    <generalfeedback format="html">')
        out.append(f"      <text>{_cdata(inst.atxt)}</text>")
        out.append("    </generalfeedback>")
        out.append(f"    <penalty>{bank.penalty}</penalty>")
        if inst.htxt:
            out.append('    <hint format="html">')
            out.append(f"      <text>{_cdata(inst.htxt)}</text>")
            out.append("    </hint>")
        out.append("  </question>")
    out.append("</quiz>")
    return "\n".join(out) + "\n"


def make_xml(t: QuizTemplate, n: int, folder, seed: int,
             story_override: int | None = None) -> str:
    """Generate n instances, write `<name>.xml` plus its manifest; returns
    the XML file path."""
    if n < 1:
        raise XmlOutError("n must be >= 1")
    instances = instantiate_batch(t, seed, n, story_override)
    # one category element per file: story-suffixed when uniform, base otherwise
    categories = {i.category for i in instances}
    category = instances[0].category if len(categories) == 1 else t.category
    bank = QuestionBank(category, tuple(instances))
    content = emit_xml(bank)
    os.makedirs(folder, exist_ok=True)
    safe_name = t.name.replace("/", "_").replace(" ", "_") or "quiz"
    path = os.path.join(folder, f"{safe_name}.xml")
    data = content.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(data)
    manifest = {"seed": seed, "n": n, "sha256": hashlib.sha256(data).hexdigest()}
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
