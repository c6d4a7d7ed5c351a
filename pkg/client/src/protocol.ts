/**
 * Wire frames for the stimulus bridge: one JSON object per line, LF
 * terminated, UTF-8. Key order on encode matches the server's convention.
 */

export interface HelloFrame {
  type: "hello";
  design: string;
  ports: { name: string; width: number }[];
}

export interface RequestFrame {
  type: "request";
  cycle: number;
  coverage: string; // decimal string, percent in [0, 100]
}

export interface StimulusFrame {
  type: "stimulus";
  values: { port: string; bits: string }[];
}

export interface DoneFrame {
  type: "done";
  reason: string;
}

export interface ErrorFrame {
  type: "error";
  code: string;
  detail: string;
}

export type WireFrame =
  | HelloFrame
  | RequestFrame
  | StimulusFrame
  | DoneFrame
  | ErrorFrame;

export class MalformedFrameError extends Error {
  constructor(excerpt: string) {
    super(`malformed frame: ${excerpt.slice(0, 80)}`);
    this.name = "MalformedFrameError";
  }
}

export function encodeFrame(frame: WireFrame): string {
  return JSON.stringify(frame) + "\n";
}

function isBits(text: unknown): text is string {
  return typeof text === "string" && text.length > 0 && /^[01]+$/.test(text);
}

export function decodeFrame(line: string): WireFrame {
  const trimmed = line.replace(/\r?\n$/, "");
  if (trimmed.trim() === "") {
    throw new MalformedFrameError("<empty line>");
  }
  let doc: unknown;
  try {
    doc = JSON.parse(trimmed);
  } catch {
    throw new MalformedFrameError(trimmed);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new MalformedFrameError(trimmed);
  }
  const obj = doc as Record<string, unknown>;
  switch (obj.type) {
    case "hello": {
      if (typeof obj.design !== "string" || !Array.isArray(obj.ports)) {
        throw new MalformedFrameError(trimmed);
      }
      const ports = obj.ports.map((p) => {
        const port = p as Record<string, unknown>;
        if (typeof port.name !== "string" || typeof port.width !== "number" ||
            !Number.isInteger(port.width) || port.width < 1) {
          throw new MalformedFrameError(trimmed);
        }
        return { name: port.name, width: port.width };
      });
      return { type: "hello", design: obj.design, ports };
    }
    case "request": {
      if (typeof obj.cycle !== "number" || !Number.isInteger(obj.cycle) ||
          obj.cycle < 0 || typeof obj.coverage !== "string") {
        throw new MalformedFrameError(trimmed);
      }
      const value = Number(obj.coverage);
      if (!Number.isFinite(value) || value < 0 || value > 100) {
        throw new MalformedFrameError(trimmed);
      }
      return { type: "request", cycle: obj.cycle, coverage: obj.coverage };
    }
    case "stimulus": {
      if (!Array.isArray(obj.values)) {
        throw new MalformedFrameError(trimmed);
      }
      const values = obj.values.map((v) => {
        const entry = v as Record<string, unknown>;
        if (typeof entry.port !== "string" || !isBits(entry.bits)) {
          throw new MalformedFrameError(trimmed);
        }
        return { port: entry.port, bits: entry.bits };
      });
      return { type: "stimulus", values };
    }
    case "done": {
      if (typeof obj.reason !== "string") {
        throw new MalformedFrameError(trimmed);
      }
      return { type: "done", reason: obj.reason };
    }
    case "error": {
      if (typeof obj.code !== "string") {
        throw new MalformedFrameError(trimmed);
      }
      return {
        type: "error",
        code: obj.code,
        detail: typeof obj.detail === "string" ? obj.detail : "",
      };
    }
    default:
      throw new MalformedFrameError(trimmed);
  }
}
