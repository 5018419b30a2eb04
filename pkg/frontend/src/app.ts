import { ApiClient, ApiRequestError } from './api';
import { UiState, initialState } from './types';
import { Handlers, render } from './view';

const NO_ANSWER_TEXT = 'The model predicts the answer is not in the text.';

/**
 * Controller: owns the UiState, serializes catalog requests (one in flight
 * per tab) and cancel-and-replaces custom-question requests.
 */
export class App {
  state: UiState = initialState();
  private answerAbort: AbortController | null = null;
  private lastAction: (() => void) | null = null;

  constructor(private root: HTMLElement, private api: ApiClient) {}

  start(): void {
    this.paint();
  }

  private paint(): void {
    const handlers: Handlers = {
      onSubmitDocument: (text) => this.submitDocument(text),
      onAskQuestion: (q) => this.askQuestion(q),
      onToggleItem: (i) => this.toggleItem(i),
      onRetry: () => this.retry(),
    };
    render(this.root, this.state, handlers);
  }

  private update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    this.paint();
  }

  async submitDocument(text: string): Promise<void> {
    if (this.state.loadingCatalog) return;
    this.lastAction = () => void this.submitDocument(text);
    this.update({ documentText: text, loadingCatalog: true, error: null });
    try {
      const res = await this.api.catalog(text);
      this.update({
        loadingCatalog: false,
        catalog: res.items,
        expanded: res.items.map(() => false),
      });
    } catch (err) {
      // failed request: keep the document and any previous catalog
      this.update({ loadingCatalog: false, error: describe(err) });
    }
  }

  async askQuestion(question: string): Promise<void> {
    if (!this.state.documentText.trim() || !question.trim()) return;
    this.lastAction = () => void this.askQuestion(question);
    this.answerAbort?.abort();
    const abort = new AbortController();
    this.answerAbort = abort;
    this.update({ customQuestion: question, loadingAnswer: true, error: null });
    try {
      const res = await this.api.answer(this.state.documentText, question, abort.signal);
      if (abort.signal.aborted) return; // superseded by a newer question
      this.update({
        loadingAnswer: false,
        customAnswer: res.answerable && res.answer !== null
          ? { kind: 'answer', answer: res.answer, score: res.score }
          : { kind: 'no-answer', message: NO_ANSWER_TEXT },
      });
    } catch (err) {
      if (abort.signal.aborted) return;
      this.update({ loadingAnswer: false, error: describe(err) });
    }
  }

  toggleItem(index: number): void {
    const expanded = [...this.state.expanded];
    expanded[index] = !expanded[index];
    this.update({ expanded });
  }

  retry(): void {
    const action = this.lastAction;
    this.update({ error: null });
    action?.();
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiRequestError) return `${err.code}: ${err.message}`;
  if (err instanceof Error) return err.message;
  return String(err);
}
