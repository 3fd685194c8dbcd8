// Builder form model and its lossless mapping onto template documents.
//
// toTemplate writes only canonical expression shapes; fromTemplate inverts
// exactly those shapes. Documents built elsewhere (hand-written or bundled
// examples) that fall outside the canon return null from fromTemplate and
// are edited as raw JSON instead.

import type { AnswerDoc, PartDoc, StoryDoc, TemplateDoc } from "./types.js";

export const SCHEMA = "quizforge-template-v1";

export type SampleSizeSpec =
  | { kind: "fixed"; value: number }
  | { kind: "range"; lo: number; hi: number; step: number };

export type DistributionSpec =
  | { kind: "uniform"; a: number; b: number }
  | { kind: "normal"; mean: number; sd: number }
  | { kind: "binomial"; size: number; p: number }
  | { kind: "chisq"; df: number }
  | { kind: "beta"; a: number; b: number }
  | { kind: "custom"; expr: string };

export type AnswerType = "numeric" | "choice" | "shortanswer" | "display";

export interface PartForm {
  text: string;
  answerType: AnswerType;
  points: number;
  // numeric: rounding digits for the graded answer
  precision: number;
  // numeric: target expression; choice: correct-option selector expression;
  // shortanswer: accepted text (may interpolate {{vars}})
  answerExpr: string;
  // choice only: either explicit options or a builtin option-set index
  options: string[];
  builtin: number | null;
  newline: boolean;
}

export interface CalculationForm {
  name: string;
  expr: string;
}

export interface BuilderForm {
  quizName: string;
  quiznamePrefix: string;
  category: string;
  count: number;
  sampleSize: SampleSizeSpec;
  distribution: DistributionSpec;
  showData: boolean;
  digits: number;
  sortData: boolean;
  calculations: CalculationForm[];
  parts: PartForm[];
  hint: string;
  feedback: string;
}

export function emptyPart(): PartForm {
  return {
    text: "",
    answerType: "display",
    points: 1,
    precision: 0,
    answerExpr: "",
    options: [],
    builtin: null,
    newline: true,
  };
}

export function defaultForm(): BuilderForm {
  return {
    quizName: "MyFirstQuiz",
    quiznamePrefix: "problem -",
    category: "Quizzes / MyFirstQuiz",
    count: 20,
    sampleSize: { kind: "range", lo: 50, hi: 100, step: 1 },
    distribution: { kind: "normal", mean: 100, sd: 10 },
    showData: true,
    digits: 1,
    sortData: false,
    calculations: [{ name: "res", expr: "round(mean(x), 2)" }],
    parts: [
      {
        ...emptyPart(),
        text: "The mean of the data is @ (round to 2 digits)",
        answerType: "numeric",
        precision: 2,
        answerExpr: "res",
      },
    ],
    hint: "Use the mean command",
    feedback: "The mean is {{res}}",
  };
}

const DATA_VAR = "x";
const SIZE_VAR = "n";
const TABLE_VAR = "tbl";
const TABLE_PART_TEXT = `{{${TABLE_VAR}}}`;

function distributionExpr(d: DistributionSpec): string {
  switch (d.kind) {
    case "uniform":
      return `runif(${SIZE_VAR}, ${d.a}, ${d.b})`;
    case "normal":
      return `rnorm(${SIZE_VAR}, ${d.mean}, ${d.sd})`;
    case "binomial":
      return `rbinom(${SIZE_VAR}, ${d.size}, ${d.p})`;
    case "chisq":
      return `rchisq(${SIZE_VAR}, ${d.df})`;
    case "beta":
      return `rbeta(${SIZE_VAR}, ${d.a}, ${d.b})`;
    case "custom":
      return d.expr;
  }
}

function sampleSizeExpr(s: SampleSizeSpec): string {
  if (s.kind === "fixed") return String(s.value);
  return `sample(seq(${s.lo}, ${s.hi}, ${s.step}), 1)`;
}

function answerDoc(p: PartForm): AnswerDoc | undefined {
  switch (p.answerType) {
    case "display":
      return undefined;
    case "numeric":
      return {
        type: "numeric",
        target: p.answerExpr,
        ndigits: String(p.precision),
        points: p.points,
      };
    case "choice": {
      const doc: AnswerDoc = {
        type: "choice",
        correct: p.answerExpr,
        points: p.points,
      };
      if (p.builtin !== null) doc.builtin = p.builtin;
      else doc.options = [...p.options];
      return doc;
    }
    case "shortanswer":
      return { type: "shortanswer", texts: [p.answerExpr], points: p.points };
  }
}

export function toTemplate(form: BuilderForm): TemplateDoc {
  const variables: { name: string; expr: string }[] = [
    { name: SIZE_VAR, expr: sampleSizeExpr(form.sampleSize) },
  ];
  let dataExpr = `round(${distributionExpr(form.distribution)}, ${form.digits})`;
  if (form.sortData) dataExpr = `sort(${dataExpr})`;
  variables.push({ name: DATA_VAR, expr: dataExpr });
  if (form.showData) {
    variables.push({ name: TABLE_VAR, expr: `moodle_table(${DATA_VAR})` });
  }
  for (const c of form.calculations) {
    variables.push({ name: c.name, expr: c.expr });
  }

  const parts: PartDoc[] = form.parts.map((p) => {
    const doc: PartDoc = { text: p.text, newline: p.newline };
    const answer = answerDoc(p);
    if (answer) doc.answer = answer;
    return doc;
  });
  if (form.showData) {
    parts.push({ text: TABLE_PART_TEXT, newline: true });
  }

  const story: StoryDoc = {
    weight: 1,
    variables,
    parts,
    hint: form.hint,
    answer_text: form.feedback,
  };
  return {
    schema: SCHEMA,
    name: form.quizName,
    category: form.category,
    quizname_prefix: form.quiznamePrefix,
    count: form.count,
    stories: [story],
  };
}

const FIXED_RE = /^(\d+)$/;
const RANGE_RE = /^sample\(seq\((-?[\d.]+), (-?[\d.]+), (-?[\d.]+)\), 1\)$/;
const SORT_RE = /^sort\((.*)\)$/;
const ROUND_RE = /^round\((.*), (-?\d+)\)$/;
const DIST_RES: [RegExp, (m: RegExpExecArray) => DistributionSpec][] = [
  [
    /^runif\(n, (-?[\d.]+), (-?[\d.]+)\)$/,
    (m) => ({ kind: "uniform", a: Number(m[1]), b: Number(m[2]) }),
  ],
  [
    /^rnorm\(n, (-?[\d.]+), (-?[\d.]+)\)$/,
    (m) => ({ kind: "normal", mean: Number(m[1]), sd: Number(m[2]) }),
  ],
  [
    /^rbinom\(n, (-?[\d.]+), (-?[\d.]+)\)$/,
    (m) => ({ kind: "binomial", size: Number(m[1]), p: Number(m[2]) }),
  ],
  [/^rchisq\(n, (-?[\d.]+)\)$/, (m) => ({ kind: "chisq", df: Number(m[1]) })],
  [
    /^rbeta\(n, (-?[\d.]+), (-?[\d.]+)\)$/,
    (m) => ({ kind: "beta", a: Number(m[1]), b: Number(m[2]) }),
  ],
];

function parseSampleSize(expr: string): SampleSizeSpec | null {
  const fixed = FIXED_RE.exec(expr);
  if (fixed) return { kind: "fixed", value: Number(fixed[1]) };
  const range = RANGE_RE.exec(expr);
  if (range) {
    return {
      kind: "range",
      lo: Number(range[1]),
      hi: Number(range[2]),
      step: Number(range[3]),
    };
  }
  return null;
}

function parseDataExpr(
  expr: string,
): { distribution: DistributionSpec; digits: number; sortData: boolean } | null {
  let sortData = false;
  let body = expr;
  const sorted = SORT_RE.exec(body);
  if (sorted) {
    sortData = true;
    body = sorted[1];
  }
  const rounded = ROUND_RE.exec(body);
  if (!rounded) return null;
  const digits = Number(rounded[2]);
  const inner = rounded[1];
  for (const [re, build] of DIST_RES) {
    const m = re.exec(inner);
    if (m) return { distribution: build(m), digits, sortData };
  }
  return { distribution: { kind: "custom", expr: inner }, digits, sortData };
}

function partFromDoc(doc: PartDoc): PartForm | null {
  const p = emptyPart();
  p.text = doc.text;
  p.newline = doc.newline ?? true;
  const a = doc.answer;
  if (!a || a.type === "display") return p;
  p.points = a.points ?? 1;
  if (a.type === "numeric") {
    if (a.target === undefined || a.ndigits === undefined) return null;
    if (!/^-?\d+$/.test(a.ndigits)) return null;
    p.answerType = "numeric";
    p.answerExpr = a.target;
    p.precision = Number(a.ndigits);
    return p;
  }
  if (a.type === "choice") {
    if (a.correct === undefined) return null;
    p.answerType = "choice";
    p.answerExpr = a.correct;
    if (a.builtin !== undefined) p.builtin = a.builtin;
    else if (a.options) p.options = [...a.options];
    else return null;
    return p;
  }
  if (a.type === "shortanswer") {
    if (!a.texts || a.texts.length !== 1) return null;
    p.answerType = "shortanswer";
    p.answerExpr = a.texts[0];
    return p;
  }
  return null;
}

export function fromTemplate(doc: TemplateDoc): BuilderForm | null {
  if (doc.schema !== SCHEMA || doc.stories.length !== 1) return null;
  const story = doc.stories[0];
  const vars = story.variables ?? [];
  if (vars.length < 2 || vars[0].name !== SIZE_VAR || vars[1].name !== DATA_VAR) {
    return null;
  }
  const sampleSize = parseSampleSize(vars[0].expr);
  const data = parseDataExpr(vars[1].expr);
  if (!sampleSize || !data) return null;

  let rest = vars.slice(2);
  let showData = false;
  if (rest.length > 0 && rest[0].name === TABLE_VAR) {
    if (rest[0].expr !== `moodle_table(${DATA_VAR})`) return null;
    showData = true;
    rest = rest.slice(1);
  }
  const calculations = rest.map((v) => ({ name: v.name, expr: v.expr }));

  let partDocs = story.parts;
  if (showData) {
    const last = partDocs[partDocs.length - 1];
    if (!last || last.text !== TABLE_PART_TEXT || last.answer) return null;
    partDocs = partDocs.slice(0, -1);
  }
  const parts: PartForm[] = [];
  for (const pd of partDocs) {
    const p = partFromDoc(pd);
    if (!p) return null;
    parts.push(p);
  }

  return {
    quizName: doc.name,
    quiznamePrefix: doc.quizname_prefix ?? "problem -",
    category: doc.category,
    count: doc.count ?? 20,
    sampleSize,
    distribution: data.distribution,
    showData,
    digits: data.digits,
    sortData: data.sortData,
    calculations,
    parts,
    hint: story.hint ?? "",
    feedback: story.answer_text ?? "",
  };
}
