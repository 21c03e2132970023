/**
 * Deterministic model backends for the wire protocol: hashed bag-of-words
 * embeddings, template inference with hash-derived token probabilities, and
 * token-overlap entailment.  All outputs match the engine's in-process stub
 * providers, so golden transcripts are shared between the two codebases.
 */

import { extractConcepts, fnv1a64, tokenize } from "./text.js";

export interface RelationTable {
  [name: string]: string; // relation name -> natural-language statement
}

export interface InferCandidate {
  text: string;
  token_probs: number[];
}

export class ModelError extends Error {}

export class EmbedModel {
  constructor(readonly dim: number = 256) {
    if (!Number.isInteger(dim) || dim < 1) {
      throw new ModelError(`bad embedding dim: ${dim}`);
    }
  }

  embedOne(text: string): number[] {
    if (!text) throw new ModelError("embed: empty string");
    const vec = new Array<number>(this.dim).fill(0);
    let tokens = tokenize(text);
    if (tokens.length === 0) tokens = [text];
    for (const tok of tokens) {
      vec[Number(fnv1a64(tok) % BigInt(this.dim))] += 1.0;
    }
    let sq = 0;
    for (const x of vec) sq += x * x;
    const norm = Math.sqrt(sq);
    if (norm === 0) throw new ModelError("zero-norm embedding");
    return vec.map((x) => x / norm);
  }

  embed(texts: string[]): number[][] {
    if (texts.length === 0) throw new ModelError("embed: empty text list");
    return texts.map((t) => this.embedOne(t));
  }
}

export class InferModel {
  constructor(
    readonly relations: RelationTable,
    readonly seed: number = 0,
  ) {}

  infer(context: string, relation: string, n: number): InferCandidate[] {
    if (!(relation in this.relations)) {
      throw new ModelError(`unknown relation: ${relation}`);
    }
    if (!Number.isInteger(n) || n < 1) {
      throw new ModelError("infer: n must be >= 1");
    }
    let concepts = extractConcepts(context);
    if (concepts.length === 0) concepts = tokenize(context);
    if (concepts.length === 0) concepts = ["something"];
    const statement = this.relations[relation];
    const out: InferCandidate[] = [];
    for (let i = 0; i < n; i++) {
      const concept = concepts[i % concepts.length];
      const text = `${statement} ${concept}`;
      const nTokens = Math.max(1, tokenize(text).length);
      const probs: number[] = [];
      for (let t = 0; t < nTokens; t++) {
        const h = fnv1a64(`${this.seed}|${relation}|${context}|${i}|${t}`);
        probs.push(0.3 + 0.65 * ((Number(h % 1000000n) + 1) / 1000000));
      }
      out.push({ text, token_probs: probs });
    }
    return out;
  }
}

export class EntailModel {
  entail(premise: string, hypothesis: string): number {
    if (!premise || !hypothesis) throw new ModelError("entail: empty input");
    const p = new Set(tokenize(premise));
    const h = new Set(tokenize(hypothesis));
    if (h.size === 0) return 0;
    let overlap = 0;
    for (const tok of h) if (p.has(tok)) overlap++;
    return overlap / h.size;
  }
}
