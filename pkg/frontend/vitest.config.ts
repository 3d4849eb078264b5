import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // every test shells out to the python CLI, which pays interpreter + JIT
    // startup per invocation
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
