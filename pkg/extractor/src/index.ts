export {
  ExtractorError,
  ValidationError,
  BadMagic,
  VersionMismatch,
  TruncatedPayload,
  NonFiniteValue,
  ScaleTooSmall,
  ModelLoadFailure,
  JobFailed,
} from "./errors.js";
export {
  MASK64,
  counterHash,
  uniform01,
  dlog,
  normPpf,
  standardNormal,
  normalField,
  uniformField,
  deriveSeed,
} from "./rng.js";
export type { JsonValue } from "./pyformat.js";
export { pyRepr, gFormat, formatFloat, compactJson, canonicalJson } from "./pyformat.js";
export { CHANNELS, ImageData, imageFromJson, imageToJson, loadImage } from "./image.js";
export {
  FAMILIES,
  NOISE_SIGMAS,
  SCALE_FACTORS,
  ROTATION_DEGREES,
  TransformCondition,
  parseSeed,
  defaultSuite,
  canonicalOrder,
  suiteToJson,
  suiteFromJson,
  resizeRaw,
  resizeImage,
  rotateQuarter,
  transformImage,
  conditionForIndex,
  transformCorpus,
} from "./transforms.js";
export type { FeatureMeta, FeatureFile } from "./rafs.js";
export {
  MAGIC,
  FORMAT_VERSION,
  HEADER_SIZE,
  defaultMeta,
  pooledFeatures,
  tokenFeatures,
  encodeRafs,
  decodeRafs,
  readRafs,
} from "./rafs.js";
export type { StandInModel } from "./models.js";
export { BUILDERS, resolveModel } from "./models.js";
export type { LatentNoising } from "./latent.js";
export { makeLatentNoising, latentNoisingFromJson, noiseLatent } from "./latent.js";
export type { ExtractionJob, SkippedImage, JobResult } from "./job.js";
export { jobFromJson, loadJob, runJob } from "./job.js";
