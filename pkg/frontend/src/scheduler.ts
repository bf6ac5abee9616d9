/**
 * Debounced latest-wins request scheduling.
 *
 * Slider changes arrive faster than the service can answer; each call
 * resets a 250 ms timer, and firing a new request aborts the in-flight one
 * so only the newest response ever reaches the view.
 */

export const DEBOUNCE_MS = 250;

export class RequestScheduler<T> {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;
  private generation = 0;

  constructor(
    private run: (signal: AbortSignal) => Promise<T>,
    private onResult: (result: T) => void,
    private onError: (err: unknown) => void = () => {},
    private delayMs: number = DEBOUNCE_MS,
  ) {}

  /** Schedule a request for the current parameters, superseding any pending one. */
  request(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire();
    }, this.delayMs);
  }

  private fire(): void {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const gen = ++this.generation;
    this.run(controller.signal).then(
      (result) => {
        if (gen === this.generation) this.onResult(result);
      },
      (err) => {
        if (gen === this.generation && !controller.signal.aborted) this.onError(err);
      },
    );
  }

  dispose(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.controller?.abort();
  }
}
