import { describe, expect, it } from "vitest";

import { EmbedModel, EntailModel, InferModel } from "../src/models";

const RELATIONS = { xReact: "as a result, x feels", Causes: "causes" };

describe("EmbedModel", () => {
  it("produces unit-norm vectors", () => {
    const model = new EmbedModel();
    for (const text of ["one", "two words", "a longer sentence here"]) {
      const v = model.embedOne(text);
      const norm = Math.sqrt(v.reduce((s, x) => s + x * x, 0));
      expect(Math.abs(norm - 1)).toBeLessThanOrEqual(1e-6);
    }
  });

  it("is deterministic", () => {
    const [a, b] = new EmbedModel().embed(["same text", "same text"]);
    expect(a).toEqual(b);
  });

  it("rejects empty inputs", () => {
    expect(() => new EmbedModel().embed([])).toThrow();
    expect(() => new EmbedModel().embedOne("")).toThrow();
  });
});

describe("InferModel", () => {
  it("instantiates the relation statement", () => {
    const [cand] = new InferModel(RELATIONS).infer(
      "We watched the storm.",
      "xReact",
      1,
    );
    expect(cand.text.startsWith("as a result, x feels")).toBe(true);
    expect(cand.token_probs.every((p) => p > 0.3 && p <= 0.95)).toBe(true);
  });

  it("cycles context concepts", () => {
    const cands = new InferModel(RELATIONS).infer("sun moon", "Causes", 3);
    expect(cands.map((c) => c.text)).toEqual([
      "causes sun",
      "causes moon",
      "causes sun",
    ]);
  });

  it("depends on the seed", () => {
    const a = new InferModel(RELATIONS, 1).infer("sun", "Causes", 1);
    const b = new InferModel(RELATIONS, 2).infer("sun", "Causes", 1);
    expect(a[0].token_probs).not.toEqual(b[0].token_probs);
  });

  it("rejects unknown relations and bad n", () => {
    const model = new InferModel(RELATIONS);
    expect(() => model.infer("x", "NotARelation", 1)).toThrow();
    expect(() => model.infer("x", "Causes", 0)).toThrow();
  });
});

describe("EntailModel", () => {
  const model = new EntailModel();

  it("scores identical texts 1.0", () => {
    expect(model.entail("the sky is blue", "the sky is blue")).toBe(1);
  });

  it("scores disjoint texts 0.0", () => {
    expect(model.entail("sun moon", "river stone")).toBe(0);
  });

  it("scores partial overlap by hypothesis coverage", () => {
    expect(model.entail("a b c d", "a b x")).toBeCloseTo(2 / 3, 12);
  });

  it("rejects empty inputs", () => {
    expect(() => model.entail("", "x")).toThrow();
  });
});
