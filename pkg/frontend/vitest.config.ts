import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    // The round-trip suite boots the Python service; first import is slow.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
