// Builder UI wiring. All quiz semantics stay on the server: the page only
// edits the template document and shows what the API returns.

import { ApiError, QuizforgeClient } from "./api.js";
import {
  BuilderForm,
  PartForm,
  defaultForm,
  emptyPart,
  fromTemplate,
  toTemplate,
} from "./model.js";
import type { TemplateDoc } from "./types.js";

const PREVIEW_DEBOUNCE_MS = 300;

type Mode = { kind: "form"; form: BuilderForm } | { kind: "raw"; text: string };

export class BuilderApp {
  private mode: Mode = { kind: "form", form: defaultForm() };
  private seed = Math.floor(Math.random() * 1_000_000);
  private index = 1;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;

  constructor(
    private client: QuizforgeClient,
    private root: HTMLElement,
  ) {}

  currentTemplate(): TemplateDoc {
    if (this.mode.kind === "form") return toTemplate(this.mode.form);
    return JSON.parse(this.mode.text) as TemplateDoc;
  }

  loadTemplate(doc: TemplateDoc): void {
    const form = fromTemplate(doc);
    if (form) this.mode = { kind: "form", form };
    else this.mode = { kind: "raw", text: JSON.stringify(doc, null, 2) };
    this.render();
    this.schedulePreview();
  }

  async start(): Promise<void> {
    this.render();
    this.schedulePreview();
    try {
      const examples = await this.client.listExamples();
      const select = this.root.querySelector<HTMLSelectElement>("#examples");
      if (select) {
        for (const ex of examples) {
          const opt = document.createElement("option");
          opt.value = String(ex.id);
          opt.textContent = `${ex.id}: ${ex.title}`;
          select.appendChild(opt);
        }
      }
    } catch {
      // examples list is a convenience; the builder works without it
    }
  }

  private schedulePreview(): void {
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => void this.refreshPreview(), PREVIEW_DEBOUNCE_MS);
  }

  // Latest-wins: any newer edit aborts the request in flight.
  private async refreshPreview(): Promise<void> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const status = this.byId("status");
    const pane = this.byId("preview");
    let doc: TemplateDoc;
    try {
      doc = this.currentTemplate();
    } catch (e) {
      status.textContent = `template JSON does not parse: ${(e as Error).message}`;
      return;
    }
    try {
      const res = await this.client.preview(doc, this.seed, this.index, undefined, controller.signal);
      if (controller !== this.inflight) return;
      status.textContent = `previewing ${res.quizname} (seed ${this.seed}, instance ${this.index})`;
      pane.innerHTML = res.qtxt;
      this.byId("hint").textContent = res.htxt;
      this.byId("feedback").innerHTML = res.atxt;
    } catch (e) {
      if (controller !== this.inflight) return;
      if ((e as Error).name === "AbortError") return;
      if (e instanceof ApiError) status.textContent = `invalid template: ${e.message}`;
      else status.textContent = `preview failed: ${(e as Error).message}`;
    }
  }

  private reroll(): void {
    this.index += 1;
    this.schedulePreview();
  }

  private async generate(): Promise<void> {
    const status = this.byId("status");
    try {
      const count = this.mode.kind === "form" ? this.mode.form.count : this.currentTemplate().count ?? 20;
      const res = await this.client.generate(this.currentTemplate(), this.seed, count);
      downloadBlob(res.filename, "application/xml", res.xml);
      status.textContent = `generated ${res.manifest.n} questions, sha256 ${res.manifest.sha256.slice(0, 12)}…`;
    } catch (e) {
      if (e instanceof ApiError) status.textContent = `invalid template: ${e.message}`;
      else status.textContent = `generate failed: ${(e as Error).message}`;
    }
  }

  private saveTemplate(): void {
    const doc = this.currentTemplate();
    const bytes = new TextEncoder().encode(JSON.stringify(doc, null, 2) + "\n");
    downloadBlob(`${doc.name || "template"}.quiz.json`, "application/json", bytes);
  }

  private byId(id: string): HTMLElement {
    const el = this.root.querySelector<HTMLElement>(`#${id}`);
    if (!el) throw new Error(`missing element #${id}`);
    return el;
  }

  private update(change: (form: BuilderForm) => void): void {
    if (this.mode.kind !== "form") return;
    change(this.mode.form);
    this.schedulePreview();
  }

  render(): void {
    this.root.innerHTML = "";
    this.root.appendChild(this.buildToolbar());
    const columns = el("div", "columns");
    columns.appendChild(this.mode.kind === "form" ? this.buildForm(this.mode.form) : this.buildRawEditor());
    columns.appendChild(this.buildPreviewPane());
    this.root.appendChild(columns);
  }

  private buildToolbar(): HTMLElement {
    const bar = el("div", "toolbar");
    bar.appendChild(button("New", () => {
      this.mode = { kind: "form", form: defaultForm() };
      this.render();
      this.schedulePreview();
    }));
    bar.appendChild(button("Reroll preview", () => this.reroll()));
    bar.appendChild(button("Save template", () => this.saveTemplate()));

    const upload = document.createElement("input");
    upload.type = "file";
    upload.accept = ".json,application/json";
    upload.id = "upload";
    upload.addEventListener("change", () => {
      const file = upload.files?.[0];
      if (!file) return;
      void file.text().then((text) => this.loadTemplate(JSON.parse(text) as TemplateDoc));
    });
    bar.appendChild(upload);

    const examples = document.createElement("select");
    examples.id = "examples";
    const placeholder = document.createElement("option");
    placeholder.value = "";
    placeholder.textContent = "Load example…";
    examples.appendChild(placeholder);
    examples.addEventListener("change", () => {
      const id = Number(examples.value);
      if (!id) return;
      void this.client.getExample(id).then((doc) => this.loadTemplate(doc));
    });
    bar.appendChild(examples);

    const seed = labelled("Seed", numberInput(this.seed, (v) => {
      this.seed = v;
      this.schedulePreview();
    }));
    bar.appendChild(seed);
    bar.appendChild(button("Generate XML", () => void this.generate()));
    return bar;
  }

  private buildRawEditor(): HTMLElement {
    const pane = el("div", "editor");
    pane.appendChild(el("p", "note", "This template uses features beyond the form (multiple stories or custom answer bands), so it is edited as JSON."));
    const area = document.createElement("textarea");
    area.id = "raw";
    area.rows = 30;
    area.value = this.mode.kind === "raw" ? this.mode.text : "";
    area.addEventListener("input", () => {
      this.mode = { kind: "raw", text: area.value };
      this.schedulePreview();
    });
    pane.appendChild(area);
    return pane;
  }

  private buildPreviewPane(): HTMLElement {
    const pane = el("div", "previewpane");
    pane.appendChild(el("div", "status", "", "status"));
    pane.appendChild(el("h3", "", "Question"));
    pane.appendChild(el("div", "preview", "", "preview"));
    pane.appendChild(el("h3", "", "Hint"));
    pane.appendChild(el("div", "hint", "", "hint"));
    pane.appendChild(el("h3", "", "General feedback"));
    pane.appendChild(el("div", "feedback", "", "feedback"));
    return pane;
  }

  private buildForm(form: BuilderForm): HTMLElement {
    const pane = el("div", "editor");

    pane.appendChild(section("Quiz", [
      labelled("Quiz name", textInput(form.quizName, (v) => this.update((f) => (f.quizName = v)))),
      labelled("Question name prefix", textInput(form.quiznamePrefix, (v) => this.update((f) => (f.quiznamePrefix = v)))),
      labelled("Category", textInput(form.category, (v) => this.update((f) => (f.category = v)))),
      labelled("Number of questions", numberInput(form.count, (v) => this.update((f) => (f.count = v)))),
    ]));

    const sizeRows: HTMLElement[] = [];
    const sizeKind = selectInput(["fixed", "range"], form.sampleSize.kind, (v) =>
      this.update((f) => {
        f.sampleSize = v === "fixed" ? { kind: "fixed", value: 50 } : { kind: "range", lo: 50, hi: 100, step: 1 };
        this.render();
      }),
    );
    sizeRows.push(labelled("Sample size", sizeKind));
    if (form.sampleSize.kind === "fixed") {
      const s = form.sampleSize;
      sizeRows.push(labelled("Value", numberInput(s.value, (v) => this.update(() => (s.value = v)))));
    } else {
      const s = form.sampleSize;
      sizeRows.push(labelled("From", numberInput(s.lo, (v) => this.update(() => (s.lo = v)))));
      sizeRows.push(labelled("To", numberInput(s.hi, (v) => this.update(() => (s.hi = v)))));
      sizeRows.push(labelled("Step", numberInput(s.step, (v) => this.update(() => (s.step = v)))));
    }
    pane.appendChild(section("Sample size", sizeRows));

    pane.appendChild(section("Data", this.distributionRows(form)));

    const calcPane = el("div");
    for (const [i, c] of form.calculations.entries()) {
      const row = el("div", "row");
      row.appendChild(labelled("Name", textInput(c.name, (v) => this.update(() => (c.name = v)))));
      row.appendChild(labelled("Expression", textInput(c.expr, (v) => this.update(() => (c.expr = v)))));
      row.appendChild(button("Remove", () => this.update((f) => {
        f.calculations.splice(i, 1);
        this.render();
      })));
      calcPane.appendChild(row);
    }
    calcPane.appendChild(button("Add calculation", () => this.update((f) => {
      f.calculations.push({ name: `v${f.calculations.length + 1}`, expr: "" });
      this.render();
    })));
    pane.appendChild(section("Calculations", [calcPane]));

    const partsPane = el("div");
    for (const [i, p] of form.parts.entries()) {
      partsPane.appendChild(this.partEditor(form, p, i));
    }
    partsPane.appendChild(button("Add part", () => this.update((f) => {
      f.parts.push(emptyPart());
      this.render();
    })));
    pane.appendChild(section("Question parts", [partsPane]));

    pane.appendChild(section("Feedback", [
      labelled("Hint", textInput(form.hint, (v) => this.update((f) => (f.hint = v)))),
      labelled("General feedback", textInput(form.feedback, (v) => this.update((f) => (f.feedback = v)))),
    ]));
    return pane;
  }

  private distributionRows(form: BuilderForm): HTMLElement[] {
    const rows: HTMLElement[] = [];
    const kinds = ["uniform", "normal", "binomial", "chisq", "beta", "custom"];
    rows.push(labelled("Distribution", selectInput(kinds, form.distribution.kind, (v) =>
      this.update((f) => {
        switch (v) {
          case "uniform": f.distribution = { kind: "uniform", a: 0, b: 1 }; break;
          case "normal": f.distribution = { kind: "normal", mean: 0, sd: 1 }; break;
          case "binomial": f.distribution = { kind: "binomial", size: 10, p: 0.5 }; break;
          case "chisq": f.distribution = { kind: "chisq", df: 5 }; break;
          case "beta": f.distribution = { kind: "beta", a: 2, b: 2 }; break;
          default: f.distribution = { kind: "custom", expr: "runif(n, 0, 1)" };
        }
        this.render();
      }),
    )));
    const d = form.distribution;
    const num = (label: string, get: () => number, set: (v: number) => void) =>
      rows.push(labelled(label, numberInput(get(), (v) => this.update(() => set(v)))));
    switch (d.kind) {
      case "uniform":
        num("Low", () => d.a, (v) => (d.a = v));
        num("High", () => d.b, (v) => (d.b = v));
        break;
      case "normal":
        num("Mean", () => d.mean, (v) => (d.mean = v));
        num("Standard deviation", () => d.sd, (v) => (d.sd = v));
        break;
      case "binomial":
        num("Size", () => d.size, (v) => (d.size = v));
        num("Success probability", () => d.p, (v) => (d.p = v));
        break;
      case "chisq":
        num("Degrees of freedom", () => d.df, (v) => (d.df = v));
        break;
      case "beta":
        num("Alpha", () => d.a, (v) => (d.a = v));
        num("Beta", () => d.b, (v) => (d.b = v));
        break;
      case "custom":
        rows.push(labelled("Expression", textInput(d.expr, (v) => this.update(() => (d.expr = v)))));
        break;
    }
    rows.push(labelled("Rounding digits", numberInput(form.digits, (v) => this.update((f) => (f.digits = v)))));
    rows.push(labelled("Show data table", checkbox(form.showData, (v) => this.update((f) => (f.showData = v)))));
    rows.push(labelled("Sort data", checkbox(form.sortData, (v) => this.update((f) => (f.sortData = v)))));
    return rows;
  }

  private partEditor(form: BuilderForm, p: PartForm, i: number): HTMLElement {
    const box = el("fieldset", "part");
    const legend = document.createElement("legend");
    legend.textContent = `Part ${i + 1}`;
    box.appendChild(legend);
    box.appendChild(labelled("Text (@ marks the blank)", textInput(p.text, (v) => this.update(() => (p.text = v)))));
    box.appendChild(labelled("Answer type", selectInput(
      ["display", "numeric", "choice", "shortanswer"],
      p.answerType,
      (v) => this.update(() => {
        p.answerType = v as PartForm["answerType"];
        this.render();
      }),
    )));
    if (p.answerType !== "display") {
      box.appendChild(labelled("Points", numberInput(p.points, (v) => this.update(() => (p.points = v)))));
    }
    if (p.answerType === "numeric") {
      box.appendChild(labelled("Answer expression", textInput(p.answerExpr, (v) => this.update(() => (p.answerExpr = v)))));
      box.appendChild(labelled("Digits", numberInput(p.precision, (v) => this.update(() => (p.precision = v)))));
    } else if (p.answerType === "choice") {
      box.appendChild(labelled("Correct option expression", textInput(p.answerExpr, (v) => this.update(() => (p.answerExpr = v)))));
      box.appendChild(labelled("Builtin option set (blank for custom)", textInput(
        p.builtin === null ? "" : String(p.builtin),
        (v) => this.update(() => (p.builtin = v === "" ? null : Number(v))),
      )));
      box.appendChild(labelled("Options (one per line)", textArea(p.options.join("\n"), (v) =>
        this.update(() => (p.options = v === "" ? [] : v.split("\n"))),
      )));
    } else if (p.answerType === "shortanswer") {
      box.appendChild(labelled("Accepted text", textInput(p.answerExpr, (v) => this.update(() => (p.answerExpr = v)))));
    }
    box.appendChild(labelled("Start on new line", checkbox(p.newline, (v) => this.update(() => (p.newline = v)))));
    box.appendChild(button("Remove part", () => this.update((f) => {
      f.parts.splice(i, 1);
      this.render();
    })));
    void form;
    return box;
  }
}

function el(tag: string, cls = "", text = "", id = ""): HTMLElement {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text) node.textContent = text;
  if (id) node.id = id;
  return node;
}

function section(title: string, rows: HTMLElement[]): HTMLElement {
  const box = el("fieldset", "section");
  const legend = document.createElement("legend");
  legend.textContent = title;
  box.appendChild(legend);
  for (const r of rows) box.appendChild(r);
  return box;
}

function labelled(label: string, input: HTMLElement): HTMLElement {
  const wrap = el("label", "field");
  wrap.appendChild(el("span", "fieldname", label));
  wrap.appendChild(input);
  return wrap;
}

function textInput(value: string, onChange: (v: string) => void): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "text";
  input.value = value;
  input.addEventListener("input", () => onChange(input.value));
  return input;
}

function textArea(value: string, onChange: (v: string) => void): HTMLTextAreaElement {
  const area = document.createElement("textarea");
  area.rows = 4;
  area.value = value;
  area.addEventListener("input", () => onChange(area.value));
  return area;
}

function numberInput(value: number, onChange: (v: number) => void): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "number";
  input.value = String(value);
  input.addEventListener("input", () => {
    const v = Number(input.value);
    if (Number.isFinite(v)) onChange(v);
  });
  return input;
}

function checkbox(value: boolean, onChange: (v: boolean) => void): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "checkbox";
  input.checked = value;
  input.addEventListener("change", () => onChange(input.checked));
  return input;
}

function selectInput(options: string[], value: string, onChange: (v: string) => void): HTMLSelectElement {
  const select = document.createElement("select");
  for (const o of options) {
    const opt = document.createElement("option");
    opt.value = o;
    opt.textContent = o;
    if (o === value) opt.selected = true;
    select.appendChild(opt);
  }
  select.addEventListener("change", () => onChange(select.value));
  return select;
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const btn = document.createElement("button");
  btn.type = "button";
  btn.textContent = label;
  btn.addEventListener("click", onClick);
  return btn;
}

function downloadBlob(filename: string, mime: string, bytes: Uint8Array): void {
  const blob = new Blob([bytes as BlobPart], { type: mime });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}
