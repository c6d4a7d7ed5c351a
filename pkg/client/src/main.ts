#!/usr/bin/env node
/**
 * CLI entry point. Exit codes: 0 clean session, 1 protocol error,
 * 2 connection failure.
 */

import { parseArgs } from "node:util";

import { runSession } from "./client.js";

function usage(): never {
  console.error(
    "usage: covrl-client --host HOST --port PORT [--cycles N] " +
    "[--transcript FILE] [--design NAME]");
  process.exit(2);
}

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        host: { type: "string", default: "127.0.0.1" },
        port: { type: "string" },
        cycles: { type: "string", default: "100" },
        transcript: { type: "string" },
        design: { type: "string", default: "alu" },
      },
    }));
  } catch {
    usage();
  }
  if (!values.port) {
    usage();
  }
  const port = Number(values.port);
  const cycles = Number(values.cycles);
  if (!Number.isInteger(port) || !Number.isInteger(cycles) || cycles < 1) {
    usage();
  }
  const result = await runSession({
    host: values.host!,
    port,
    maxCycles: cycles,
    design: values.design,
    transcriptPath: values.transcript,
  });
  const summary = result.doneReason
    ? `done (${result.doneReason})`
    : result.errorCode
      ? `error (${result.errorCode})`
      : result.exitCode === 2
        ? "connect failed"
        : "budget spent";
  console.error(
    `session: ${summary}, ${result.cyclesDriven} cycles, ` +
    `coverage ${(result.coverage * 100).toFixed(1)}%`);
  return result.exitCode;
}

const invokedDirectly = process.argv[1] &&
  import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => process.exit(code));
}
