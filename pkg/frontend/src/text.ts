/**
 * Text primitives kept byte-for-byte compatible with the engine's Python
 * implementations, so stub outputs agree across both processes.
 */

/** 64-bit FNV-1a over the UTF-8 bytes of `data`. */
export function fnv1a64(data: string): bigint {
  let h = 0xcbf29ce484222325n;
  const bytes = new TextEncoder().encode(data);
  for (const byte of bytes) {
    h ^= BigInt(byte);
    h = (h * 0x100000001b3n) & 0xffffffffffffffffn;
  }
  return h;
}

const TOKEN_RE = /[a-z0-9']+/g;

/** Lowercase alphanumeric tokens, punctuation stripped, order kept. */
export function tokenize(text: string): string[] {
  return text.toLowerCase().match(TOKEN_RE) ?? [];
}

// Deliberately small and frozen stopword list (mirrors the engine).
const STOPWORDS = new Set(
  (
    "a about above after again all also am an and any are as at be because " +
    "been before being below between both but by can could did do does doing " +
    "down during each few for from further had has have having he her here " +
    "hers him his how i if in into is it its itself just me more most my no " +
    "nor not now of off on once only or other our ours out over own same she " +
    "should so some such than that the their theirs them then there these " +
    "they this those through to too under until up very was we were what " +
    "when where which while who whom why will with would you your yours"
  ).split(" "),
);

/** Concept surfaces: tokens minus stopwords and single-character tokens. */
export function extractConcepts(text: string): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const tok of tokenize(text)) {
    if (tok.length < 2 || STOPWORDS.has(tok) || seen.has(tok)) continue;
    seen.add(tok);
    out.push(tok);
  }
  return out;
}
