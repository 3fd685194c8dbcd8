"""Command-line frontend: generate, preview, validate, grade, paste, serve.

Exit codes: 0 success, 1 validation error, 2 generation error, 3 I/O error.
When no --seed is given a fresh random seed is drawn and printed to stderr
so every run stays reproducible after the fact.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import shutil
import subprocess
import sys

import click

from . import cloze, corpus, pastedata, template, xmlout

EXIT_VALIDATION = 1
EXIT_GENERATION = 2
EXIT_IO = 3


class CliError(click.ClickException):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.exit_code = code


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(63)
        click.echo(f"seed: {seed}", err=True)
    return seed


def _load(template_path: str) -> template.QuizTemplate:
    try:
        with open(template_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(f"cannot read {template_path}: {e}", EXIT_IO) from None
    try:
        return template.load_template(text)
    except template.TemplateError as e:
        raise CliError(f"invalid template: {e}", EXIT_VALIDATION) from None


@click.group()
def main():
    """Compile randomized quiz templates into Moodle XML question banks."""


@main.command()
@click.argument("template_path", type=click.Path())
@click.option("--n", type=int, default=None, help="Number of quiz instances.")
@click.option("--seed", type=int, default=None, help="Master seed (default: random).")
@click.option("--out", default=".", help="Output folder.")
@click.option("--story", type=int, default=None, help="Fix the story index (1-based).")
def generate(template_path, n, seed, out, story):
    """Generate an XML question bank from a template."""
    t = _load(template_path)
    n = t.count_default if n is None else n
    if n < 1:
        raise CliError("n must be ≥ 1", EXIT_VALIDATION)
    seed = _resolve_seed(seed)
    try:
        path = xmlout.make_xml(t, n, out, seed, story)
    except (template.GenerationError, xmlout.XmlOutError) as e:
        raise CliError(str(e), EXIT_GENERATION) from None
    except OSError as e:
        raise CliError(f"cannot write output: {e}", EXIT_IO) from None
    with open(path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    click.echo(path)
    click.echo(f"sha256: {digest}")


@main.command()
@click.argument("template_path", type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--index", type=int, default=0, help="Instance index (0-based).")
@click.option("--story", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["html", "text"]), default="text")
def preview(template_path, seed, index, story, fmt):
    """Render one quiz instance to stdout."""
    t = _load(template_path)
    if index < 0:
        raise CliError("index must be ≥ 0", EXIT_VALIDATION)
    seed = _resolve_seed(seed)
    try:
        inst = template.instantiate(t, seed, index, story)
    except template.GenerationError as e:
        raise CliError(str(e), EXIT_GENERATION) from None
    if fmt == "html":
        click.echo("<!DOCTYPE html><html><head><meta charset=\"utf-8\">"
                   f"<title>{inst.quizname}</title></head><body>"
                   f"<h4>{inst.quizname} ({inst.category})</h4>"
                   f"{inst.qtxt}<hr>Hint: {inst.htxt}<hr>Answer: {inst.atxt}"
                   "</body></html>")
    else:
        click.echo(f"quizname: {inst.quizname}")
        click.echo(f"category: {inst.category}")
        click.echo(f"qtxt: {inst.qtxt}")
        click.echo(f"htxt: {inst.htxt}")
        click.echo(f"atxt: {inst.atxt}")


@main.command()
@click.argument("path", type=click.Path())
def validate(path):
    """Validate a template document or a generated XML file."""
    if path.endswith(".xml"):
        import xml.etree.ElementTree as ET
        try:
            tree = ET.parse(path)
        except OSError as e:
            raise CliError(f"cannot read {path}: {e}", EXIT_IO) from None
        except ET.ParseError as e:
            raise CliError(f"not well-formed XML: {e}", EXIT_VALIDATION) from None
        for q in tree.getroot().iter("question"):
            if q.get("type") != "cloze":
                continue
            name = q.findtext("name/text", default="?")
            qtext = q.findtext("questiontext/text", default="")
            try:
                cloze.parse_cloze(qtext)
            except cloze.ClozeError as e:
                raise CliError(f"question {name!r}: {e}", EXIT_VALIDATION) from None
        click.echo("ok")
        return
    _load(path)
    click.echo("ok")


@main.command()
@click.argument("xml_or_template", type=click.Path())
@click.argument("answers_file", type=click.Path())
@click.option("--seed", type=int, default=None, help="Seed (template input only).")
@click.option("--index", type=int, default=0, help="Instance index (template input only).")
@click.option("--name", default=None, help="Question name (XML input only).")
def grade(xml_or_template, answers_file, seed, index, name):
    """Grade a list of responses against a question's CLOZE fields."""
    try:
        with open(answers_file, "r", encoding="utf-8") as fh:
            answers_doc = json.load(fh)
    except OSError as e:
        raise CliError(f"cannot read answers: {e}", EXIT_IO) from None
    except json.JSONDecodeError as e:
        raise CliError(f"answers file is not valid JSON: {e}", EXIT_VALIDATION) from None
    if isinstance(answers_doc, dict):
        answers_doc = answers_doc.get("answers", [])
    if not isinstance(answers_doc, list):
        raise CliError("answers must be a JSON list", EXIT_VALIDATION)
    answers = [str(a) for a in answers_doc]

    if xml_or_template.endswith(".xml"):
        import xml.etree.ElementTree as ET
        try:
            tree = ET.parse(xml_or_template)
        except ET.ParseError as e:
            raise CliError(f"not well-formed XML: {e}", EXIT_VALIDATION) from None
        qtext = None
        for q in tree.getroot().iter("question"):
            if q.get("type") != "cloze":
                continue
            qname = q.findtext("name/text", default="")
            if name is None or qname == name:
                qtext = q.findtext("questiontext/text", default="")
                break
        if qtext is None:
            raise CliError("no matching cloze question in file", EXIT_VALIDATION)
        _, subs = cloze.parse_cloze(qtext)
    else:
        t = _load(xml_or_template)
        seed = _resolve_seed(seed)
        inst = template.instantiate(t, seed, index)
        _, subs = cloze.parse_cloze(inst.qtxt)

    total_points = sum(s.points for s in subs)
    earned = 0.0
    for i, sub in enumerate(subs):
        response = answers[i] if i < len(answers) else ""
        result = cloze.grade_response(sub, response)
        flag = " (non-numeric)" if result.non_numeric else ""
        click.echo(f"field {i + 1} [{sub.kind}, {sub.points} pt]: "
                   f"{result.fraction:.2f}{flag}")
        earned += result.fraction * sub.points
    pct = 100.0 * earned / total_points if total_points else 0.0
    click.echo(f"total: {earned:g}/{total_points} ({pct:.1f}%)")


def _read_clipboard() -> str:
    for cmd in (["pbpaste"], ["xclip", "-selection", "clipboard", "-o"],
                ["xsel", "--clipboard", "--output"],
                ["powershell.exe", "-command", "Get-Clipboard"]):
        if shutil.which(cmd[0]):
            try:
                return subprocess.run(cmd, capture_output=True, text=True,
                                      check=True).stdout
            except subprocess.CalledProcessError:
                continue
    raise CliError("no clipboard reader available on this system", EXIT_IO)


@main.command()
@click.option("--in", "source", default="clipboard",
              help="Input: 'clipboard' or a file path.")
@click.option("--out", "out_path", default=None, help="CSV output file (default stdout).")
def paste(source, out_path):
    """Parse copied quiz data into CSV."""
    if source == "clipboard":
        text = _read_clipboard()
    else:
        try:
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise CliError(f"cannot read {source}: {e}", EXIT_IO) from None
    try:
        table = pastedata.parse_pasted(text)
    except pastedata.PasteError as e:
        raise CliError(str(e), EXIT_VALIDATION) from None
    out = pastedata.to_csv(table)
    if out_path:
        try:
            with open(out_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(out)
        except OSError as e:
            raise CliError(f"cannot write {out_path}: {e}", EXIT_IO) from None
        click.echo(out_path)
    else:
        click.echo(out, nl=False)


@main.command()
@click.option("--port", type=int, default=8437)
@click.option("--host", default="127.0.0.1")
def serve(port, host):
    """Run the HTTP API used by the builder UI."""
    import uvicorn

    from .service import app
    uvicorn.run(app, host=host, port=port)


@main.command()
def examples():
    """List the bundled example templates."""
    for meta in corpus.list_examples():
        click.echo(f"{meta['id']:2d}  {meta['title']}")


if __name__ == "__main__":
    main()
