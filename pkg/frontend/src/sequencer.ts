/**
 * Latest-wins request serialization for a single-user form session.
 *
 * Each edit schedules a request; when responses resolve out of order,
 * only the one belonging to the newest scheduled request is applied.
 * Stale results (and stale failures) resolve to null so callers simply
 * skip them; only the newest request's failure propagates. A debounce
 * wrapper collapses keystroke bursts into one request.
 */

export class LatestWins<T> {
  private sequence = 0;

  async run(task: () => Promise<T>): Promise<T | null> {
    const ticket = ++this.sequence;
    try {
      const result = await task();
      return ticket === this.sequence ? result : null;
    } catch (failure) {
      if (ticket === this.sequence) {
        throw failure;
      }
      return null;
    }
  }
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
  timers: {
    set: (cb: () => void, ms: number) => unknown;
    clear: (handle: unknown) => void;
  } = {
    set: (cb, ms) => setTimeout(cb, ms),
    clear: (handle) => clearTimeout(handle as Parameters<typeof clearTimeout>[0]),
  },
): (...args: A) => void {
  let pending: unknown;
  return (...args: A) => {
    if (pending !== undefined) {
      timers.clear(pending);
    }
    pending = timers.set(() => {
      pending = undefined;
      fn(...args);
    }, waitMs);
  };
}
