/**
 * Client-side utterance pre-check.
 *
 * The console never interprets an utterance; it only needs to know which
 * template the service's grammar will land on, so the react signal can be
 * offered exactly when the utterance is an action command.  The token
 * rules here mirror the service grammar: articles are dropped, relation
 * phrases are a closed set matched longest-first with at least one word
 * on each side, and "move" is the only verb.
 */

export const RELATION_PHRASES = ["in front of", "left of", "right of", "behind"];
export const VERBS = ["move"];

const ARTICLES = new Set(["a", "an", "the"]);

const PHRASE_TOKENS = RELATION_PHRASES.map((p) => p.split(" ")).sort(
  (a, b) => b.length - a.length,
);

export type UtteranceKind =
  | "empty"
  | "property" // bare attribute words naming one object
  | "relation" // two references joined by a relation phrase
  | "action" // verb + two references: the react template
  | "dangling-verb"; // verb with no relation phrase after it: unparseable

export function tokenize(content: string): string[] {
  return content
    .toLowerCase()
    .split(/\s+/)
    .filter((w) => w.length > 0 && !ARTICLES.has(w));
}

function splitOnRelation(words: string[]): boolean {
  for (const phrase of PHRASE_TOKENS) {
    const k = phrase.length;
    // i >= 1 and i + k < words.length: a reference on both sides.
    for (let i = 1; i < words.length - k; i++) {
      if (phrase.every((tok, j) => words[i + j] === tok)) {
        return true;
      }
    }
  }
  return false;
}

export function classify(content: string): UtteranceKind {
  const words = tokenize(content);
  if (words.length === 0) {
    return "empty";
  }
  if (VERBS.includes(words[0]!)) {
    return splitOnRelation(words.slice(1)) ? "action" : "dangling-verb";
  }
  return splitOnRelation(words) ? "relation" : "property";
}

/** True when the utterance fits the template the react signal requires. */
export function isActionTemplate(content: string): boolean {
  return classify(content) === "action";
}
