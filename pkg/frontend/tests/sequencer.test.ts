import { describe, expect, it } from "vitest";

import { LatestWins, debounce } from "../src/sequencer.js";

function deferred<T>(): { promise: Promise<T>; resolve: (v: T) => void; reject: (e: unknown) => void } {
  let resolve!: (v: T) => void;
  let reject!: (e: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

describe("LatestWins", () => {
  it("applies responses arriving in order", async () => {
    const seq = new LatestWins<string>();
    expect(await seq.run(async () => "first")).toBe("first");
    expect(await seq.run(async () => "second")).toBe("second");
  });

  it("drops a stale response that resolves after a newer request", async () => {
    const seq = new LatestWins<string>();
    const slow = deferred<string>();
    const fast = deferred<string>();
    const first = seq.run(() => slow.promise);
    const second = seq.run(() => fast.promise);
    fast.resolve("new");
    slow.resolve("old");
    expect(await second).toBe("new");
    expect(await first).toBeNull();
  });

  it("swallows stale failures but propagates the newest one", async () => {
    const seq = new LatestWins<string>();
    const slow = deferred<string>();
    const fast = deferred<string>();
    const first = seq.run(() => slow.promise);
    const second = seq.run(() => fast.promise);
    slow.reject(new Error("stale failure"));
    fast.reject(new Error("current failure"));
    expect(await first).toBeNull();
    await expect(second).rejects.toThrow("current failure");
  });
});

describe("debounce", () => {
  it("collapses a burst into the last call", () => {
    const timers = new Map<number, () => void>();
    let nextHandle = 0;
    const control = {
      set: (cb: () => void, _ms: number) => {
        timers.set(++nextHandle, cb);
        return nextHandle;
      },
      clear: (handle: unknown) => {
        timers.delete(handle as number);
      },
    };
    const seen: number[] = [];
    const fire = debounce((value: number) => seen.push(value), 150, control);
    fire(1);
    fire(2);
    fire(3);
    expect(timers.size).toBe(1);
    for (const cb of timers.values()) {
      cb();
    }
    expect(seen).toEqual([3]);
  });
});
