import { describe, expect, it } from "vitest";
import { ValidationError } from "../src/errors.js";
import { ImageData, imageFromJson, imageToJson } from "../src/image.js";

describe("ImageData", () => {
  it("indexes row-major with the channel innermost", () => {
    const px = new Float64Array(2 * 2 * 3).map((_, i) => i / 12);
    const img = new ImageData(2, 2, px);
    expect(img.at(0, 0, 0)).toBe(px[0]);
    expect(img.at(0, 1, 2)).toBe(px[5]);
    expect(img.at(1, 0, 1)).toBe(px[7]);
  });

  it("rejects bad shapes, non-finite pixels, and out-of-range values", () => {
    expect(() => new ImageData(0, 2, new Float64Array(0))).toThrow(ValidationError);
    expect(() => new ImageData(2, 2, new Float64Array(11))).toThrow(ValidationError);
    expect(() => new ImageData(1, 1, Float64Array.from([0, Number.NaN, 0]))).toThrow(ValidationError);
    expect(() => new ImageData(1, 1, Float64Array.from([0, 1.5, 0]))).toThrow(ValidationError);
    expect(() => new ImageData(1, 1, Float64Array.from([0, -0.5, 0]))).toThrow(ValidationError);
  });
});

describe("JSON container", () => {
  it("round-trips an image exactly", () => {
    const px = new Float64Array(3 * 4 * 3).map((_, i) => (i % 7) / 7);
    const img = new ImageData(3, 4, px);
    const back = imageFromJson(imageToJson(img));
    expect(back.height).toBe(3);
    expect(back.width).toBe(4);
    expect(back.pixels).toEqual(px);
  });

  it("rejects malformed containers with clear messages", () => {
    expect(() => imageFromJson("not json")).toThrow(/not an image file/);
    expect(() => imageFromJson("[1,2,3]")).toThrow(ValidationError);
    expect(() => imageFromJson('{"shape":[2,2],"data":[]}')).toThrow(/height, width, 3/);
    expect(() => imageFromJson('{"shape":[1,1,3],"data":[0,"x",0]}')).toThrow(/numeric/);
    expect(() => imageFromJson('{"shape":[1,1,3],"data":[0,0]}')).toThrow(ValidationError);
  });
});
