import { describe, expect, it } from "vitest";
import {
  BuilderForm,
  DistributionSpec,
  PartForm,
  SampleSizeSpec,
  defaultForm,
  emptyPart,
  fromTemplate,
  toTemplate,
} from "../src/model.js";

function roundTrip(form: BuilderForm): void {
  const doc = toTemplate(form);
  const back = fromTemplate(doc);
  expect(back).not.toBeNull();
  expect(back).toEqual(form);
  // the document itself must also be stable under a second pass
  expect(toTemplate(back as BuilderForm)).toEqual(doc);
}

describe("form to template round trip", () => {
  it("preserves the default form", () => {
    roundTrip(defaultForm());
  });

  it("preserves every distribution kind", () => {
    const dists: DistributionSpec[] = [
      { kind: "uniform", a: -2.5, b: 7 },
      { kind: "normal", mean: 100, sd: 10 },
      { kind: "binomial", size: 500, p: 0.35 },
      { kind: "chisq", df: 7 },
      { kind: "beta", a: 2, b: 3.5 },
      { kind: "custom", expr: "sample(1:6, n)" },
    ];
    for (const distribution of dists) {
      roundTrip({ ...defaultForm(), distribution });
    }
  });

  it("preserves fixed and ranged sample sizes", () => {
    const sizes: SampleSizeSpec[] = [
      { kind: "fixed", value: 50 },
      { kind: "range", lo: 20, hi: 200, step: 5 },
    ];
    for (const sampleSize of sizes) {
      roundTrip({ ...defaultForm(), sampleSize });
    }
  });

  it("preserves data display toggles and digits", () => {
    for (const showData of [true, false]) {
      for (const sortData of [true, false]) {
        for (const digits of [0, 1, 3]) {
          roundTrip({ ...defaultForm(), showData, sortData, digits });
        }
      }
    }
  });

  it("preserves every answer type", () => {
    const parts: PartForm[] = [
      { ...emptyPart(), text: "intro text, no blank" },
      {
        ...emptyPart(),
        text: "the mean is @",
        answerType: "numeric",
        answerExpr: "res",
        precision: 2,
        points: 3,
      },
      {
        ...emptyPart(),
        text: "the true mean is @ the estimate",
        answerType: "choice",
        answerExpr: "1",
        options: ["lower than", "equal to", "higher than"],
        newline: false,
      },
      {
        ...emptyPart(),
        text: "we reject @",
        answerType: "choice",
        answerExpr: "if (res < 0.05) 1 else 2",
        builtin: 3,
      },
      {
        ...emptyPart(),
        text: "the method is called @",
        answerType: "shortanswer",
        answerExpr: "least squares",
        points: 2,
      },
    ];
    roundTrip({ ...defaultForm(), parts });
  });

  it("preserves empty calculations and empty parts", () => {
    roundTrip({ ...defaultForm(), calculations: [], parts: [] });
  });

  it("preserves metadata fields verbatim", () => {
    roundTrip({
      ...defaultForm(),
      quizName: "Exam 2 - version B",
      quiznamePrefix: "exam2 -",
      category: "Stat 101 / Exams",
      count: 75,
      hint: "re-read chapter 4",
      feedback: "the answer was {{res}}",
    });
  });

  it("survives randomized forms", () => {
    // deterministic linear congruential generator so failures reproduce
    let state = 12345;
    const rnd = () => {
      state = (state * 1103515245 + 12345) % 2147483648;
      return state / 2147483648;
    };
    const pick = <T>(xs: T[]): T => xs[Math.floor(rnd() * xs.length)];
    for (let trial = 0; trial < 200; trial++) {
      const distribution = pick<DistributionSpec>([
        { kind: "uniform", a: Math.floor(rnd() * 10), b: 10 + Math.floor(rnd() * 10) },
        { kind: "normal", mean: Math.floor(rnd() * 100), sd: 1 + Math.floor(rnd() * 9) },
        { kind: "chisq", df: 1 + Math.floor(rnd() * 20) },
        { kind: "custom", expr: `sample(1:${1 + Math.floor(rnd() * 9)}, n)` },
      ]);
      const parts: PartForm[] = [];
      const nParts = 1 + Math.floor(rnd() * 4);
      for (let i = 0; i < nParts; i++) {
        const answerType = pick(["display", "numeric", "shortanswer"] as const);
        const p = { ...emptyPart(), text: `part ${i} @`, answerType, newline: rnd() < 0.5 };
        if (answerType === "numeric") {
          p.answerExpr = "res";
          p.precision = Math.floor(rnd() * 5);
          p.points = 1 + Math.floor(rnd() * 4);
        } else if (answerType === "shortanswer") {
          p.answerExpr = `word${i}`;
          p.points = 1 + Math.floor(rnd() * 4);
        } else {
          p.text = `part ${i}`;
        }
        parts.push(p);
      }
      roundTrip({
        ...defaultForm(),
        count: 1 + Math.floor(rnd() * 100),
        sampleSize: pick<SampleSizeSpec>([
          { kind: "fixed", value: 10 + Math.floor(rnd() * 90) },
          { kind: "range", lo: 10, hi: 20 + Math.floor(rnd() * 80), step: 1 + Math.floor(rnd() * 5) },
        ]),
        distribution,
        showData: rnd() < 0.5,
        sortData: rnd() < 0.5,
        digits: Math.floor(rnd() * 4),
        calculations: [{ name: "res", expr: `round(mean(x), ${Math.floor(rnd() * 4)})` }],
        parts,
      });
    }
  });
});

describe("foreign documents fall back to raw editing", () => {
  it("rejects multi-story documents", () => {
    const doc = toTemplate(defaultForm());
    doc.stories = [doc.stories[0], doc.stories[0]];
    expect(fromTemplate(doc)).toBeNull();
  });

  it("rejects numeric answers with explicit bands", () => {
    const doc = toTemplate(defaultForm());
    doc.stories[0].parts[0].answer = {
      type: "numeric",
      targets: ["res", "res"],
      weights: [100, 80],
      tolerances: ["0.005", "0.05"],
    };
    expect(fromTemplate(doc)).toBeNull();
  });

  it("rejects documents whose variables do not start with n and x", () => {
    const doc = toTemplate(defaultForm());
    doc.stories[0].variables = [{ name: "y", expr: "1" }];
    expect(fromTemplate(doc)).toBeNull();
  });

  it("rejects unknown schemas", () => {
    const doc = toTemplate(defaultForm());
    doc.schema = "something-else";
    expect(fromTemplate(doc)).toBeNull();
  });
});
