/** Extraction jobs: images through transforms and a model into feature files.
 *
 * A job names a model (or an "a+b" model pairing), a layer selection, a
 * transform suite, an image list, optional latent noising, and an output
 * directory. Running it writes one RAFS file per condition, model side, and
 * layer, then the manifests the alignment scorer consumes:
 *
 * - paired model, one layer  -> manifest.json (kind se_cknna_manifest) + suite.json
 * - single model, a reference feature file, several layers
 *                            -> manifest.json (kind layer_profile_manifest)
 *
 * An extraction_index.json inventory is always written. Every feature file
 * goes through write-temp-then-rename, and manifests are written last, so a
 * reader that sees a manifest sees finished feature files. Images that fail
 * to decode are skipped and logged; the job fails when more than one percent
 * of the list is skipped.
 */

import { mkdirSync, readFileSync, renameSync, writeFileSync } from "node:fs";
import * as path from "node:path";
import { JobFailed, ValidationError } from "./errors.js";
import { ImageData, loadImage } from "./image.js";
import { LatentNoising, latentNoisingFromJson, noiseLatent } from "./latent.js";
import { StandInModel, resolveModel } from "./models.js";
import type { JsonValue } from "./pyformat.js";
import { canonicalJson } from "./pyformat.js";
import { FeatureFile, FeatureMeta, encodeRafs, pooledFeatures, tokenFeatures } from "./rafs.js";
import {
  TransformCondition,
  canonicalOrder,
  conditionForIndex,
  parseSeed,
  suiteToJson,
  transformImage,
} from "./transforms.js";

export interface ExtractionJob {
  /** "name#seed" for one model, "a#1+b#2" for a pairing */
  modelSpec: string;
  /** strictly increasing layer indices, or "all" */
  layerSelector: number[] | "all";
  conditionSuite: TransformCondition[];
  imageList: string[];
  diffusionNoising: LatentNoising | null;
  outputDir: string;
  /** existing feature file to profile layers against (single-model jobs) */
  reference: string | null;
  referenceLevel: number | null;
}

export interface SkippedImage {
  path: string;
  reason: string;
}

export interface JobResult {
  /** relative paths of every feature file, keyed "side/label/layer" */
  files: Map<string, string>;
  manifestPath: string | null;
  suitePath: string | null;
  indexPath: string;
  skipped: SkippedImage[];
  imageCount: number;
}

/** Parse and validate a job spec object (the content of a job JSON file). */
export function jobFromJson(obj: unknown, baseDir = "."): ExtractionJob {
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ValidationError("job spec must be a JSON object");
  }
  const rec = obj as Record<string, unknown>;
  for (const key of ["model_spec", "condition_suite", "image_list", "output_dir"]) {
    if (!(key in rec)) {
      throw new ValidationError(`job spec missing key '${key}'`);
    }
  }
  const modelSpec = String(rec.model_spec);
  let layerSelector: number[] | "all" = "all";
  if (rec.layer_selector !== undefined && rec.layer_selector !== "all") {
    if (!Array.isArray(rec.layer_selector) || rec.layer_selector.length === 0) {
      throw new ValidationError("layer_selector must be \"all\" or a non-empty list of indices");
    }
    layerSelector = rec.layer_selector.map((v) => {
      if (typeof v !== "number" || !Number.isInteger(v) || v < 0) {
        throw new ValidationError(`layer index must be a non-negative integer, got ${JSON.stringify(v)}`);
      }
      return v;
    });
    for (let i = 1; i < layerSelector.length; i++) {
      if (layerSelector[i] <= layerSelector[i - 1]) {
        throw new ValidationError("layer indices must be strictly increasing");
      }
    }
  }
  const suiteRaw = rec.condition_suite;
  if (!Array.isArray(suiteRaw) || suiteRaw.length === 0) {
    throw new ValidationError("condition_suite must be a non-empty list");
  }
  const conditionSuite = suiteRaw.map((row) => TransformCondition.fromJson(row));
  const labels = new Set<string>();
  for (const cond of conditionSuite) {
    const label = cond.label();
    if (labels.has(label)) {
      throw new ValidationError(`duplicate condition ${label}`);
    }
    labels.add(label);
  }
  const imagesRaw = rec.image_list;
  if (!Array.isArray(imagesRaw) || imagesRaw.length === 0) {
    throw new ValidationError("image_list must be a non-empty list of paths");
  }
  const imageList = imagesRaw.map((p) => path.resolve(baseDir, String(p)));
  const noising =
    rec.diffusion_noising === undefined || rec.diffusion_noising === null
      ? null
      : latentNoisingFromJson(rec.diffusion_noising, parseSeed);
  const reference =
    rec.reference === undefined || rec.reference === null
      ? null
      : path.resolve(baseDir, String(rec.reference));
  const referenceLevel =
    rec.reference_level === undefined || rec.reference_level === null
      ? null
      : Number(rec.reference_level);
  return {
    modelSpec,
    layerSelector,
    conditionSuite,
    imageList,
    diffusionNoising: noising,
    outputDir: path.resolve(baseDir, String(rec.output_dir)),
    reference,
    referenceLevel,
  };
}

export function loadJob(jobPath: string): ExtractionJob {
  let obj: unknown;
  try {
    obj = JSON.parse(readFileSync(jobPath, "utf-8"));
  } catch (exc) {
    throw new ValidationError(`${jobPath}: ${(exc as Error).message}`);
  }
  return jobFromJson(obj, path.dirname(jobPath));
}

function selectLayers(model: StandInModel, selector: number[] | "all"): number[] {
  if (selector === "all") {
    return Array.from({ length: model.layerCount }, (_, i) => i);
  }
  for (const layer of selector) {
    if (layer >= model.layerCount) {
      throw new ValidationError(
        `model ${model.id} has ${model.layerCount} layers, layer ${layer} does not exist`,
      );
    }
  }
  return selector;
}

/** Atomic write: temp file in the target directory, then rename. */
function writeAtomic(target: string, data: Buffer): void {
  const tmp = `${target}.tmp-${process.pid}`;
  writeFileSync(tmp, data);
  renameSync(tmp, target);
}

interface CorpusEntry {
  image: ImageData;
  /** position in the original image list; keys per-image noise substreams */
  originalIndex: number;
}

function decodeImages(
  job: ExtractionJob,
  log: (message: string) => void,
): { corpus: CorpusEntry[]; skipped: SkippedImage[] } {
  const corpus: CorpusEntry[] = [];
  const skipped: SkippedImage[] = [];
  job.imageList.forEach((imagePath, i) => {
    try {
      corpus.push({ image: loadImage(imagePath), originalIndex: i });
    } catch (exc) {
      const reason = (exc as Error).message;
      skipped.push({ path: imagePath, reason });
      log(`skipping ${imagePath}: ${reason}`);
    }
  });
  if (skipped.length > 0.01 * job.imageList.length) {
    throw new JobFailed(
      `${skipped.length} of ${job.imageList.length} images failed to decode (over the 1% budget)`,
    );
  }
  if (corpus.length === 0) {
    throw new JobFailed("no images decoded");
  }
  return { corpus, skipped };
}

function extractSide(
  model: StandInModel,
  corpus: CorpusEntry[],
  cond: TransformCondition,
  layer: number,
  noising: LatentNoising | null,
): FeatureFile {
  const n = corpus.length;
  const width = model.pooled ? model.dim : model.tokenCount * model.dim;
  const data = new Float32Array(n * width);
  for (let i = 0; i < n; i++) {
    const { image, originalIndex } = corpus[i];
    const transformed = transformImage(image, conditionForIndex(cond, originalIndex));
    const prepared = model.preprocess(transformed);
    let z = model.embed(prepared, layer);
    if (noising) {
      z = noiseLatent(z, noising, BigInt(layer), BigInt(originalIndex));
    }
    data.set(Float32Array.from(z), i * width);
  }
  const meta: FeatureMeta = {
    modelId: model.id,
    layerId: layer,
    condition: cond,
    pooled: model.pooled,
    sourceImageCount: n,
  };
  return model.pooled
    ? pooledFeatures(n, model.dim, data, meta)
    : tokenFeatures(n, model.tokenCount, model.dim, model.clsPresent, data, meta);
}

function featureName(side: string, cond: TransformCondition, layer: number): string {
  return `features/${side}_${cond.label()}_layer${layer}.rafs`;
}

/** Run one job. Feature files first, index and manifests last. */
export function runJob(job: ExtractionJob, log: (message: string) => void = console.warn): JobResult {
  const specs = job.modelSpec.split("+").map((s) => s.trim());
  if (specs.length > 2 || specs.some((s) => s.length === 0)) {
    throw new ValidationError(`model_spec must be one model or an 'a+b' pairing, got '${job.modelSpec}'`);
  }
  const models = specs.map((spec) => resolveModel(spec));
  const paired = models.length === 2;
  if (paired && job.reference !== null) {
    throw new ValidationError("a paired job cannot also profile against a reference");
  }
  const layerLists = models.map((model) => selectLayers(model, job.layerSelector));
  if (paired && (layerLists[0].length !== 1 || layerLists[1].length !== 1)) {
    throw new ValidationError("a paired job must select exactly one layer");
  }
  if (!paired && job.reference !== null && layerLists[0].length < 2) {
    throw new ValidationError("profiling against a reference needs at least two layers");
  }

  const { corpus, skipped } = decodeImages(job, log);
  const conditions = canonicalOrder(job.conditionSuite);
  mkdirSync(path.join(job.outputDir, "features"), { recursive: true });

  const files = new Map<string, string>();
  const sides = paired ? ["a", "b"] : ["m"];
  for (const cond of conditions) {
    models.forEach((model, sideIdx) => {
      for (const layer of layerLists[sideIdx]) {
        const rel = featureName(sides[sideIdx], cond, layer);
        const fs = extractSide(model, corpus, cond, layer, job.diffusionNoising);
        writeAtomic(path.join(job.outputDir, rel), encodeRafs(fs));
        files.set(`${sides[sideIdx]}/${cond.label()}/${layer}`, rel);
      }
    });
  }

  const index: JsonValue = {
    kind: "extraction_index",
    model_specs: models.map((m) => m.id),
    image_count: BigInt(corpus.length),
    skipped: skipped.map((s) => ({ path: path.basename(s.path), reason: s.reason })),
    entries: conditions.flatMap((cond) =>
      models.flatMap((model, sideIdx) =>
        layerLists[sideIdx].map((layer): JsonValue => ({
          side: sides[sideIdx],
          condition: cond.toJson(),
          layer_index: BigInt(layer),
          path: files.get(`${sides[sideIdx]}/${cond.label()}/${layer}`)!,
        })),
      ),
    ),
  };

  let manifest: JsonValue | null = null;
  let suite: JsonValue | null = null;
  if (paired) {
    const layer = layerLists[0][0];
    const layerB = layerLists[1][0];
    manifest = {
      kind: "se_cknna_manifest",
      conditions: conditions.map((cond): JsonValue => ({
        condition: cond.toJson(),
        a: files.get(`a/${cond.label()}/${layer}`)!,
        b: files.get(`b/${cond.label()}/${layerB}`)!,
      })),
    };
    suite = suiteToJson(conditions);
  } else if (job.reference !== null) {
    const relRef = path.relative(job.outputDir, job.reference);
    const entry: { [key: string]: JsonValue } = {
      kind: "layer_profile_manifest",
      reference: relRef.split(path.sep).join("/"),
      layers: layerLists[0].map((layer): JsonValue => ({
        path: files.get(`m/${conditions[0].label()}/${layer}`)!,
        layer_index: BigInt(layer),
      })),
    };
    if (job.referenceLevel !== null) {
      entry.reference_level = job.referenceLevel;
    }
    if (conditions.length !== 1) {
      throw new ValidationError("profiling against a reference needs exactly one condition");
    }
    manifest = entry;
  }

  // inventory and manifests land only after every feature file is in place
  const indexPath = path.join(job.outputDir, "extraction_index.json");
  writeAtomic(indexPath, canonicalJson(index));
  let manifestPath: string | null = null;
  let suitePath: string | null = null;
  if (manifest) {
    manifestPath = path.join(job.outputDir, "manifest.json");
    writeAtomic(manifestPath, canonicalJson(manifest));
  }
  if (suite) {
    suitePath = path.join(job.outputDir, "suite.json");
    writeAtomic(suitePath, canonicalJson(suite));
  }
  return { files, manifestPath, suitePath, indexPath, skipped, imageCount: corpus.length };
}
