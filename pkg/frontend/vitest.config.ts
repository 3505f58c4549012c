import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      // The UI is served by the service itself, so the app and the API are
      // same-origin; the smoke test runs against a real server on this port.
      happyDOM: { url: "http://127.0.0.1:8733/" },
    },
    include: ["test/**/*.test.ts"],
    testTimeout: 60000,
    hookTimeout: 60000,
  },
});
