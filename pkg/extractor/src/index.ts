export {
  createEncoder,
  DEFAULT_ENCODER_ID,
  knownEncoders,
  registerEncoder,
  type Encoder,
} from './encoders.js';
export {
  decodeFrame,
  listClipFolders,
  selectFrameIndices,
  type FrameFolder,
  type FramePixels,
} from './frames.js';
export {
  DEFAULT_FRAMES_PER_CLIP,
  runExtract,
  type ExtractJob,
  type ExtractReport,
  type SkippedClip,
} from './extract.js';
export {
  FORMAT_VERSION,
  MAGIC,
  readEmbeddings,
  VwebFormatError,
  writeEmbeddings,
  type ClipRecord,
} from './vweb.js';
