import { describe, expect, it } from "vitest";

import {
  addColumn,
  getMetadata,
  importRawText,
  metadata,
  parseCorpus,
  removeColumn,
  serializeCorpus,
  setMetadata,
  tokenCount,
} from "../src/conll.js";
import { SAMPLE_CONLL } from "./fixtures.js";

describe("corpus parsing", () => {
  it("parses the golden file structure", () => {
    const corpus = parseCorpus(SAMPLE_CONLL);
    expect(corpus).toHaveLength(2);
    expect(Object.fromEntries(metadata(corpus[0]))).toEqual({
      sent_id: "gameboy-1",
      intent: "inform",
    });
    expect(corpus[0].tokens).toHaveLength(6);
    expect(corpus[1].tokens).toHaveLength(4);
    expect(corpus[0].tokens[2]).toEqual(["3", "Eevee", "PROPN", "B-MISC"]);
    expect(tokenCount(corpus)).toBe(10);
  });

  it("round-trips the golden file byte-exactly", () => {
    expect(serializeCorpus(parseCorpus(SAMPLE_CONLL))).toBe(SAMPLE_CONLL);
  });

  it("keeps empty columns and tolerates CRLF", () => {
    const corpus = parseCorpus("a\t\tb\r\n\r\nc\r\n");
    expect(corpus[0].tokens[0]).toEqual(["a", "", "b"]);
    expect(corpus[1].tokens[0]).toEqual(["c"]);
  });

  it("rejects comments after tokens with a line number", () => {
    expect(() => parseCorpus("a\tb\n# late\n")).toThrowError(/line 2/);
  });

  it("value round-trips generated corpora", () => {
    const corpus = parseCorpus("# note\n# k = v\nx\ty\nz\n\nq\n");
    expect(parseCorpus(serializeCorpus(corpus))).toEqual(corpus);
  });
});

describe("metadata", () => {
  it("reads, overwrites, and deduplicates keys", () => {
    const utt = parseCorpus("# k = 1\n# note\n# k = 2\nx\n")[0];
    expect(getMetadata(utt, "k")).toBe("1");
    setMetadata(utt, "k", "3");
    expect(utt.comments).toEqual(["k = 3", "note"]);
  });
});

describe("columns", () => {
  it("adds and removes as an inverse pair", () => {
    const corpus = parseCorpus(SAMPLE_CONLL);
    const index = addColumn(corpus, "O");
    expect(index).toBe(5);
    removeColumn(corpus, index);
    expect(serializeCorpus(corpus)).toBe(SAMPLE_CONLL);
  });
});

describe("raw text import", () => {
  it("splits utterances on blank lines and tokens on whitespace", () => {
    const corpus = importRawText("a  b\n\nc");
    expect(corpus.map((u) => u.tokens.length)).toEqual([2, 1]);
  });
});
