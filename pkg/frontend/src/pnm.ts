/** Binary PPM (P6) / PGM (P5) encode and decode, maxval 255 only. */

export interface ImageArray {
  /** Row-major H*W*C samples. */
  data: Uint8Array;
  width: number;
  height: number;
  channels: 1 | 3;
}

export class FormatError extends Error {}

export function checkImage(img: ImageArray): void {
  if (img.channels !== 1 && img.channels !== 3) {
    throw new FormatError(`expected 1 or 3 channels, got ${img.channels}`);
  }
  if (!Number.isInteger(img.width) || !Number.isInteger(img.height) ||
      img.width < 1 || img.height < 1) {
    throw new FormatError("width and height must be positive integers");
  }
  const expected = img.width * img.height * img.channels;
  if (!(img.data instanceof Uint8Array)) {
    throw new FormatError("image data must be a Uint8Array");
  }
  if (img.data.length !== expected) {
    throw new FormatError(
      `data length ${img.data.length} does not match ${img.height}x${img.width}x${img.channels}`);
  }
}

export function encodePnm(img: ImageArray): Buffer {
  checkImage(img);
  const magic = img.channels === 1 ? "P5" : "P6";
  const header = Buffer.from(`${magic}\n${img.width} ${img.height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(img.data)]);
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a ||
         byte === 0x0b || byte === 0x0c || byte === 0x0d;
}

export function decodePnm(buf: Buffer): ImageArray {
  const magic = buf.toString("ascii", 0, 2);
  if (magic !== "P5" && magic !== "P6") {
    throw new FormatError(`not a binary PGM/PPM buffer (magic '${magic}')`);
  }
  const tokens: number[] = [];
  let pos = 2;
  while (tokens.length < 3) {
    while (pos < buf.length && isSpace(buf[pos])) pos++;
    if (buf[pos] === 0x23) { // '#' comment runs to end of line
      while (pos < buf.length && buf[pos] !== 0x0a) pos++;
      continue;
    }
    const start = pos;
    while (pos < buf.length && !isSpace(buf[pos])) pos++;
    tokens.push(parseInt(buf.toString("ascii", start, pos), 10));
  }
  pos++; // single whitespace after maxval
  const [width, height, maxval] = tokens;
  if (maxval !== 255) {
    throw new FormatError(`unsupported maxval ${maxval}; need 255`);
  }
  const channels = magic === "P5" ? 1 : 3;
  const expected = width * height * channels;
  if (buf.length - pos < expected) {
    throw new FormatError("truncated raster data");
  }
  return {
    data: new Uint8Array(buf.subarray(pos, pos + expected)),
    width,
    height,
    channels: channels as 1 | 3,
  };
}
