/** Error taxonomy; every failure the package raises derives from ExtractorError. */

export class ExtractorError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** Malformed input: bad schema, bad value, bad file content. */
export class ValidationError extends ExtractorError {}

/** Feature file does not start with the expected magic bytes. */
export class BadMagic extends ValidationError {}

/** Feature file declares an unsupported version, flags, or dirty reserved bytes. */
export class VersionMismatch extends ValidationError {}

/** Feature file is shorter than its header promises, or has trailing bytes. */
export class TruncatedPayload extends ValidationError {}

/** Payload holds NaN or Inf. */
export class NonFiniteValue extends ValidationError {}

/** A scale factor collapses an image below one pixel. */
export class ScaleTooSmall extends ValidationError {}

/** The requested model spec is not in the registry. */
export class ModelLoadFailure extends ExtractorError {}

/** Too many images in a job failed to decode. */
export class JobFailed extends ExtractorError {}
