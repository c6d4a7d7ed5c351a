import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    testTimeout: 60_000,
    hookTimeout: 60_000,
    // sessions spawn real covrl servers; keep files sequential so ports and
    // child processes stay easy to reason about
    fileParallelism: false,
  },
});
