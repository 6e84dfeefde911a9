import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    // tests build their own happy-dom Window; the node environment
    // keeps real network fetch for the end-to-end run
    environment: 'node',
    include: ['tests/**/*.test.ts'],
    testTimeout: 120000,
    hookTimeout: 120000,
  },
});
