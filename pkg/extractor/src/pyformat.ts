/** Number and JSON formatting that byte-matches the reference tools.
 *
 * Feature-file metadata and manifests must hash identically no matter which
 * side of the pipeline wrote them, so this module reproduces the exact
 * formatting rules of the consumer: CPython float repr for compact metadata
 * JSON, printf %g for condition labels, nine-significant-digit floats for
 * canonical manifest JSON. All three pick decimal digits the same way the
 * reference does and diverge from JavaScript's default stringification only
 * in exponent thresholds and the trailing ".0" convention.
 */

import { ValidationError } from "./errors.js";

/** JSON-compatible value tree. The reference serializers emit integers and
 * floats differently, and a JS number cannot carry that distinction, so here
 * `bigint` means integer (seeds, counts, indices) and `number` means float. */
export type JsonValue =
  | null
  | boolean
  | number
  | bigint
  | string
  | JsonValue[]
  | { [key: string]: JsonValue };

function splitExponential(s: string): { digits: string; exp: number; neg: boolean } {
  const m = /^(-?)(\d)(?:\.(\d+))?e([+-]\d+)$/.exec(s);
  if (!m) {
    throw new ValidationError(`unexpected exponential form ${s}`);
  }
  return { neg: m[1] === "-", digits: m[2] + (m[3] ?? ""), exp: parseInt(m[4], 10) };
}

function padExp(exp: number): string {
  const sign = exp < 0 ? "-" : "+";
  const mag = Math.abs(exp).toString();
  return `e${sign}${mag.length < 2 ? "0" + mag : mag}`;
}

function stripZeros(frac: string): string {
  return frac.replace(/0+$/, "");
}

/** Assemble a plain decimal from significant digits and a base-10 exponent. */
function fixedForm(digits: string, exp: number): string {
  const trimmed = stripZeros(digits);
  const sig = trimmed === "" ? "0" : trimmed;
  if (exp >= 0) {
    if (sig.length > exp + 1) {
      return `${sig.slice(0, exp + 1)}.${sig.slice(exp + 1)}`;
    }
    return sig + "0".repeat(exp + 1 - sig.length);
  }
  return `0.${"0".repeat(-exp - 1)}${sig}`;
}

function expForm(digits: string, exp: number): string {
  const trimmed = stripZeros(digits.slice(1));
  const mantissa = trimmed === "" ? digits[0] : `${digits[0]}.${trimmed}`;
  return mantissa + padExp(exp);
}

/** Shortest round-trip decimal with repr exponent thresholds (1e-4, 1e16);
 * integral values in the fixed range keep a trailing ".0". */
export function pyRepr(v: number): string {
  if (!Number.isFinite(v)) {
    throw new ValidationError("cannot format a non-finite number");
  }
  if (v === 0) {
    return Object.is(v, -0) ? "-0.0" : "0.0";
  }
  const { digits, exp, neg } = splitExponential(v.toExponential());
  const sign = neg ? "-" : "";
  if (exp < -4 || exp >= 16) {
    return sign + expForm(digits, exp);
  }
  const fixed = fixedForm(digits, exp);
  return sign + (fixed.includes(".") ? fixed : fixed + ".0");
}

/** printf %g: `precision` significant digits, exponent outside [1e-4, 10^precision). */
export function gFormat(v: number, precision = 6): string {
  if (!Number.isFinite(v)) {
    throw new ValidationError("cannot format a non-finite number");
  }
  if (v === 0) {
    return Object.is(v, -0) ? "-0" : "0";
  }
  const { digits, exp, neg } = splitExponential(v.toExponential(precision - 1));
  const sign = neg ? "-" : "";
  if (exp < -4 || exp >= precision) {
    return sign + expForm(digits, exp);
  }
  return sign + fixedForm(digits, exp);
}

/** Nine-significant-digit decimal, idempotent under reparse-and-format. */
export function formatFloat(v: number): string {
  if (!Number.isFinite(v)) {
    throw new ValidationError("reports cannot carry non-finite numbers");
  }
  let s = gFormat(v, 9);
  if (!s.includes("e") && !s.includes("E") && !s.includes(".")) {
    s += ".0";
  }
  return s;
}

function escapeString(s: string): string {
  let out = JSON.stringify(s);
  // the consumer escapes every non-ASCII character
  out = out.replace(/[-￿]/g, (ch) => `\\u${ch.charCodeAt(0).toString(16).padStart(4, "0")}`);
  return out;
}

function compactValue(value: JsonValue, float: (v: number) => string): string {
  if (value === null) {
    return "null";
  }
  if (typeof value === "boolean") {
    return value ? "true" : "false";
  }
  if (typeof value === "bigint") {
    return value.toString();
  }
  if (typeof value === "number") {
    return float(value);
  }
  if (typeof value === "string") {
    return escapeString(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map((item) => compactValue(item, float)).join(",")}]`;
  }
  const keys = Object.keys(value).sort();
  const parts = keys.map((key) => `${escapeString(key)}:${compactValue(value[key], float)}`);
  return `{${parts.join(",")}}`;
}

/** Compact sorted-key JSON with repr floats; the metadata encoding. */
export function compactJson(value: JsonValue): string {
  return compactValue(value, pyRepr);
}

function emitValue(value: JsonValue, indent: number, out: string[]): void {
  const pad = "  ".repeat(indent);
  if (value === null) {
    out.push("null");
  } else if (typeof value === "boolean") {
    out.push(value ? "true" : "false");
  } else if (typeof value === "bigint") {
    out.push(value.toString());
  } else if (typeof value === "number") {
    out.push(formatFloat(value));
  } else if (typeof value === "string") {
    out.push(escapeString(value));
  } else if (Array.isArray(value)) {
    if (value.length === 0) {
      out.push("[]");
      return;
    }
    out.push("[\n");
    value.forEach((item, i) => {
      out.push(pad + "  ");
      emitValue(item, indent + 1, out);
      out.push(i + 1 < value.length ? ",\n" : "\n");
    });
    out.push(pad + "]");
  } else {
    const keys = Object.keys(value).sort();
    if (keys.length === 0) {
      out.push("{}");
      return;
    }
    out.push("{\n");
    keys.forEach((key, i) => {
      out.push(`${pad}  ${escapeString(key)}: `);
      emitValue(value[key], indent + 1, out);
      out.push(i + 1 < keys.length ? ",\n" : "\n");
    });
    out.push(pad + "}");
  }
}

/** Sorted-key, two-space-indent JSON with a trailing newline; the manifest encoding. */
export function canonicalJson(value: JsonValue): Buffer {
  const parts: string[] = [];
  emitValue(value, 0, parts);
  parts.push("\n");
  return Buffer.from(parts.join(""), "utf-8");
}
