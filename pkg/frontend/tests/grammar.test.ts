import { describe, expect, it } from "vitest";

import { classify, isActionTemplate, tokenize } from "../src/grammar.js";

describe("tokenize", () => {
  it("lowercases and drops articles", () => {
    expect(tokenize("The Blue Cone")).toEqual(["blue", "cone"]);
    expect(tokenize("  a  an the ")).toEqual([]);
  });
});

describe("classify", () => {
  it("labels bare property phrases", () => {
    expect(classify("red")).toBe("property");
    expect(classify("red box")).toBe("property");
  });

  it("labels relation phrases with a reference on each side", () => {
    expect(classify("blue cone left of red cylinder")).toBe("relation");
    expect(classify("box in front of ball")).toBe("relation");
    expect(classify("cone behind cylinder")).toBe("relation");
  });

  it("requires something on both sides of the relation", () => {
    expect(classify("left of red cylinder")).toBe("property");
    expect(classify("blue cone left of")).toBe("property");
  });

  it("labels verb commands as actions", () => {
    expect(classify("move blue cone right of red cylinder")).toBe("action");
    expect(classify("move the box behind the ball")).toBe("action");
  });

  it("flags a verb with no relation phrase", () => {
    expect(classify("move")).toBe("dangling-verb");
    expect(classify("move blue cone")).toBe("dangling-verb");
  });

  it("handles empty input", () => {
    expect(classify("")).toBe("empty");
    expect(classify("the a an")).toBe("empty");
  });
});

describe("isActionTemplate", () => {
  it("accepts exactly the react-able template", () => {
    expect(isActionTemplate("move blue cone right of red cylinder")).toBe(true);
    expect(isActionTemplate("blue cone right of red cylinder")).toBe(false);
    expect(isActionTemplate("move")).toBe(false);
  });
});
