/**
 * Reference session driver: hello, then request/stimulus rounds applied to
 * the mock DUV until the server sends done, an error arrives, or the cycle
 * budget runs out. Blocking single-connection flow, no dependencies beyond
 * node's socket API, so the logic transliterates directly into a C DPI
 * client.
 */

import * as net from "node:net";
import * as fs from "node:fs";
import * as readline from "node:readline";

import { MockDuv, OPCODE_WIDTH } from "./mockduv.js";
import {
  MalformedFrameError,
  WireFrame,
  decodeFrame,
  encodeFrame,
} from "./protocol.js";

export interface SessionOptions {
  host: string;
  port: number;
  maxCycles: number;
  design?: string;
  transcriptPath?: string;
  timeoutMs?: number;
}

export interface SessionResult {
  exitCode: number; // 0 clean, 1 protocol error, 2 connect failure
  cyclesDriven: number;
  coverage: number; // final mock-DUV coverage fraction
  doneReason?: string;
  errorCode?: string;
  transcript: string[];
}

export function runSession(options: SessionOptions): Promise<SessionResult> {
  const design = options.design ?? "alu";
  const timeoutMs = options.timeoutMs ?? 10_000;
  const duv = new MockDuv();
  const transcript: string[] = [];
  let cycle = 0;
  let finished = false;

  return new Promise((resolve) => {
    const socket = net.createConnection({ host: options.host, port: options.port });
    socket.setTimeout(timeoutMs);

    const finish = (partial: Omit<SessionResult, "cyclesDriven" | "coverage" | "transcript">) => {
      if (finished) return;
      finished = true;
      socket.destroy();
      if (options.transcriptPath) {
        fs.writeFileSync(options.transcriptPath,
          transcript.map((line) => line + "\n").join(""));
      }
      resolve({
        ...partial,
        cyclesDriven: cycle,
        coverage: duv.coverage(),
        transcript,
      });
    };

    const send = (frame: WireFrame) => {
      const encoded = encodeFrame(frame);
      transcript.push("> " + encoded.trimEnd());
      socket.write(encoded);
    };

    const nextRequest = () => {
      if (cycle >= options.maxCycles) {
        finish({ exitCode: 0 }); // budget spent without a done; clean stop
        return;
      }
      cycle += 1;
      send({ type: "request", cycle, coverage: duv.coverageText() });
    };

    socket.on("connect", () => {
      send({
        type: "hello",
        design,
        ports: [{ name: "opcode", width: OPCODE_WIDTH }],
      });
      nextRequest();
    });

    socket.on("error", (err: NodeJS.ErrnoException) => {
      if (err.code === "ECONNREFUSED" || err.code === "ENOTFOUND" ||
          err.code === "EHOSTUNREACH") {
        finish({ exitCode: 2 });
      } else {
        finish({ exitCode: 1 });
      }
    });

    socket.on("timeout", () => finish({ exitCode: 1 }));
    socket.on("close", () => finish({ exitCode: 1 }));

    const lines = readline.createInterface({ input: socket });
    lines.on("error", () => finish({ exitCode: 1 }));
    lines.on("line", (line) => {
      transcript.push("< " + line);
      let frame: WireFrame;
      try {
        frame = decodeFrame(line);
      } catch (err) {
        if (err instanceof MalformedFrameError) {
          finish({ exitCode: 1 });
          return;
        }
        throw err;
      }
      switch (frame.type) {
        case "stimulus": {
          for (const { port, bits } of frame.values) {
            if (port === "opcode") {
              duv.apply(bits);
            }
          }
          nextRequest();
          break;
        }
        case "done":
          finish({ exitCode: 0, doneReason: frame.reason });
          break;
        case "error":
          finish({ exitCode: 1, errorCode: frame.code });
          break;
        default:
          // hello/request are client-to-server only
          finish({ exitCode: 1 });
      }
    });
  });
}
