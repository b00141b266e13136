/**
 * Debounced live rescoring with a monotonic request counter: an in-flight
 * response is discarded whenever a newer request was issued before it
 * landed, so the applied state can never move backwards.
 */
export class DebouncedFetcher<T> {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private issued = 0;

  constructor(
    private readonly fetchValue: () => Promise<T>,
    private readonly apply: (value: T) => void,
    private readonly onError: (error: unknown) => void,
    private readonly delayMs = 150,
  ) {}

  schedule(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.fire();
    }, this.delayMs);
  }

  /** Immediate (already-debounced) trigger; true iff the response was applied. */
  async fire(): Promise<boolean> {
    const token = ++this.issued;
    let value: T;
    try {
      value = await this.fetchValue();
    } catch (error) {
      this.onError(error);
      return false;
    }
    if (token !== this.issued) {
      return false; // superseded by a newer edit
    }
    this.apply(value);
    return true;
  }
}
