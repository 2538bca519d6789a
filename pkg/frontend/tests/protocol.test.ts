import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  GestureLabel,
  ProtocolError,
  gestureOverride,
  handInput,
  hello,
  parse,
  serialize,
  setConfig,
} from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));
// the same golden corpus the backend freezes: both ends must agree byte-for-byte
const corpusPath = join(here, "..", "..", "tests", "data", "protocol_corpus.ndjson");

describe("golden corpus", () => {
  const lines = readFileSync(corpusPath, "utf-8").trim().split("\n");

  it("every line parses and re-serializes to a stable canonical form", () => {
    // byte identity with the Python corpus is not required (Python prints
    // 0.0 where JS prints 0), but values must survive and the canonical
    // form must be a fixed point
    expect(lines.length).toBeGreaterThanOrEqual(10);
    for (const line of lines) {
      const once = serialize(parse(line));
      expect(parse(once)).toEqual(JSON.parse(line));
      expect(serialize(parse(once))).toBe(once);
    }
  });
});

describe("parse", () => {
  it("rejects bad json", () => {
    expect(() => parse("{nope")).toThrowError(ProtocolError);
  });

  it("rejects wrong version", () => {
    expect(() => parse('{"type":"hello","v":9}')).toThrowError(/bad_version/);
  });

  it("rejects unknown type", () => {
    expect(() => parse('{"type":"warp","v":1}')).toThrowError(/unknown_type/);
  });

  it("rejects missing required field", () => {
    expect(() => parse('{"type":"hand_input","v":1,"t":0}')).toThrowError(
      /missing_field/,
    );
  });

  it("rejects bad vector lengths", () => {
    const msg =
      '{"type":"hand_input","v":1,"t":0,"pos":[1,2],"quat":[1,0,0,0],"finger_dist":0}';
    expect(() => parse(msg)).toThrowError(/bad_field/);
  });

  it("rejects unknown config keys", () => {
    expect(() => parse('{"type":"set_config","v":1,"warp":9}')).toThrowError(
      /bad_field/,
    );
  });
});

describe("builders", () => {
  it("produce frames that parse", () => {
    for (const msg of [
      hello("operator"),
      hello("observer"),
      handInput(0.1, [0.01, 0, 0], [1, 0, 0, 0], 0.08),
      gestureOverride(GestureLabel.Fist),
      setConfig({ eta: 0.2, latency: 0.1 }),
    ]) {
      expect(parse(serialize(msg))).toEqual(msg);
    }
  });

  it("serialization is canonical regardless of key order", () => {
    const a = serialize({ v: 1, type: "hello", role: "operator" });
    const b = serialize({ role: "operator", type: "hello", v: 1 });
    expect(a).toBe(b);
    expect(a).toBe('{"role":"operator","type":"hello","v":1}');
  });
});
