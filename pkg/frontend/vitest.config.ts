import { defineConfig } from "vitest/config";

export default defineConfig({
  resolve: {
    // Sources use explicit ".js" specifiers so the tsc output runs natively
    // in the browser; map them back to the ".ts" files for the test runner.
    alias: [{ find: /^(\.{1,2}\/.*)\.js$/, replacement: "$1" }],
  },
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
  },
});
