/** Images as flat float64 pixel arrays, plus the JSON container they travel in.
 *
 * Pixels are row-major with the channel innermost: index (y, x, c) lives at
 * (y * width + x) * 3 + c. That ordering doubles as the noise-stream counter
 * order, so a noise field regenerated from a serialized condition lands on
 * the same pixels everywhere.
 */

import { readFileSync } from "node:fs";
import { ValidationError } from "./errors.js";

export const CHANNELS = 3;

export class ImageData {
  readonly height: number;
  readonly width: number;
  readonly pixels: Float64Array;

  constructor(height: number, width: number, pixels: Float64Array) {
    if (!Number.isInteger(height) || !Number.isInteger(width) || height < 1 || width < 1) {
      throw new ValidationError("image must have positive height and width");
    }
    if (pixels.length !== height * width * CHANNELS) {
      throw new ValidationError(
        `pixel buffer holds ${pixels.length} values, expected ${height * width * CHANNELS}`,
      );
    }
    for (let i = 0; i < pixels.length; i++) {
      const v = pixels[i];
      if (!Number.isFinite(v)) {
        throw new ValidationError("image contains non-finite pixels");
      }
      if (v < 0 || v > 1) {
        throw new ValidationError("image pixels must lie in [0, 1]");
      }
    }
    this.height = height;
    this.width = width;
    this.pixels = pixels;
  }

  at(y: number, x: number, c: number): number {
    return this.pixels[(y * this.width + x) * CHANNELS + c];
  }
}

/** Parse the image JSON container: {"shape": [h, w, 3], "data": [...]}. */
export function imageFromJson(text: string): ImageData {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch (exc) {
    throw new ValidationError(`not an image file: ${(exc as Error).message}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ValidationError("image file must hold a JSON object");
  }
  const { shape, data } = obj as { shape?: unknown; data?: unknown };
  if (!Array.isArray(shape) || shape.length !== 3 || shape[2] !== CHANNELS) {
    throw new ValidationError("image shape must be [height, width, 3]");
  }
  const [h, w] = shape as [number, number, number];
  if (!Array.isArray(data)) {
    throw new ValidationError("image data must be an array");
  }
  const px = new Float64Array(data.length);
  for (let i = 0; i < data.length; i++) {
    const v = (data as unknown[])[i];
    if (typeof v !== "number") {
      throw new ValidationError("image data must be numeric");
    }
    px[i] = v;
  }
  return new ImageData(h, w, px);
}

export function loadImage(path: string): ImageData {
  return imageFromJson(readFileSync(path, "utf-8"));
}

/** Serialize an image into the JSON container (plain JSON, not canonical). */
export function imageToJson(img: ImageData): string {
  return JSON.stringify({
    shape: [img.height, img.width, CHANNELS],
    data: Array.from(img.pixels),
  });
}
