import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { App } from '../src/app';
import { flush, jsonResponse, makeItem, mockFetch } from './helpers';

function mount(fetchFn: Parameters<typeof ApiClient.prototype.catalog> extends never ? never : any) {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById('app') as HTMLElement;
  const app = new App(root, new ApiClient('', fetchFn));
  app.start();
  return { root, app };
}

function submitDocument(root: HTMLElement, text: string) {
  const textarea = root.querySelector<HTMLTextAreaElement>('#document-input')!;
  textarea.value = text;
  root.querySelector('form.doc-form')!.dispatchEvent(new Event('submit', { bubbles: true }));
}

function askQuestion(root: HTMLElement, question: string) {
  const input = root.querySelector<HTMLInputElement>('#question-input')!;
  input.value = question;
  root.querySelector('form.question-form')!.dispatchEvent(new Event('submit', { bubbles: true }));
}

describe('paste -> catalog flow', () => {
  it('renders one row per item', async () => {
    const items = Array.from({ length: 25 }, (_, i) =>
      makeItem({ question: `Question ${i}?`, answer: `answer ${i}`, sentence_index: i }));
    const fetchFn = mockFetch({
      '/api/catalog': () => jsonResponse({ items, warnings: [] }),
    });
    const { root } = mount(fetchFn);
    submitDocument(root, 'A long document.');
    await flush();
    const rows = root.querySelectorAll('#catalog-list .catalog-item');
    expect(rows).toHaveLength(25);
    expect(rows[0]?.textContent).toContain('Question 0?');
  });

  it('reveals the answer when a question row is toggled', async () => {
    const fetchFn = mockFetch({
      '/api/catalog': () => jsonResponse({ items: [makeItem()], warnings: [] }),
    });
    const { root } = mount(fetchFn);
    submitDocument(root, 'doc');
    await flush();
    expect(root.querySelector('.item-answer')).toBeNull();
    (root.querySelector('.item-question') as HTMLElement).click();
    expect(root.querySelector('.item-answer')?.textContent).toBe('Watt');
  });

  it('blocks empty submissions with inline validation, no API call', async () => {
    const fetchFn = mockFetch({
      '/api/catalog': () => jsonResponse({ items: [], warnings: [] }),
    });
    const { root } = mount(fetchFn);
    submitDocument(root, '   ');
    await flush();
    expect(root.querySelector('#doc-validation')?.textContent).toContain('Enter some text');
    expect(fetchFn.calls).toHaveLength(0);
  });

  it('shows a retryable banner on 503 and preserves state', async () => {
    let failures = 1;
    const fetchFn = mockFetch({
      '/api/catalog': () => {
        if (failures-- > 0) {
          return jsonResponse({ code: 'models_not_loaded', message: 'loading' }, 503);
        }
        return jsonResponse({ items: [makeItem()], warnings: [] });
      },
    });
    const { root } = mount(fetchFn);
    submitDocument(root, 'my document');
    await flush();
    const banner = root.querySelector('#error-banner');
    expect(banner?.textContent).toContain('models_not_loaded');
    // the pasted document survives the failure
    expect(root.querySelector<HTMLTextAreaElement>('#document-input')?.value).toBe('my document');
    (root.querySelector('.error-retry') as HTMLElement).click();
    await flush();
    expect(root.querySelector('#error-banner')).toBeNull();
    expect(root.querySelectorAll('.catalog-item')).toHaveLength(1);
  });

  it('hides the catalog section until a response has arrived', () => {
    const fetchFn = mockFetch({});
    const { root } = mount(fetchFn);
    expect(root.querySelector('#catalog-list')).toBeNull();
  });
});

describe('custom question flow', () => {
  const catalogRoute = { '/api/catalog': () => jsonResponse({ items: [makeItem()], warnings: [] }) };

  it('is disabled until a document is present', () => {
    const fetchFn = mockFetch({});
    const { root } = mount(fetchFn);
    expect(root.querySelector<HTMLInputElement>('#question-input')?.disabled).toBe(true);
  });

  it('renders an answer card for an answerable response', async () => {
    const fetchFn = mockFetch({
      ...catalogRoute,
      '/api/answer': () => jsonResponse({ answerable: true, answer: 'Watt', score: -0.4 }),
    });
    const { root } = mount(fetchFn);
    submitDocument(root, 'The engine was improved by Watt.');
    await flush();
    askQuestion(root, 'Who improved the engine?');
    await flush();
    expect(root.querySelector('#answer-card .answer-highlight')?.textContent).toBe('Watt');
  });

  it('renders the no-answer message for answerable=false', async () => {
    const fetchFn = mockFetch({
      ...catalogRoute,
      '/api/answer': () =>
        jsonResponse({ answerable: false, answer: null, score: -3.0, message: 'no_answer_found' }),
    });
    const { root } = mount(fetchFn);
    submitDocument(root, 'Some document.');
    await flush();
    askQuestion(root, 'What is unrelated?');
    await flush();
    expect(root.querySelector('#answer-card')).toBeNull();
    expect(root.querySelector('#no-answer-message')?.textContent)
      .toContain('not in the text');
  });

  it('never calls /api/answer with an empty question', async () => {
    const fetchFn = mockFetch({
      ...catalogRoute,
      '/api/answer': () => jsonResponse({ answerable: true, answer: 'x', score: -1 }),
    });
    const { root } = mount(fetchFn);
    submitDocument(root, 'doc text');
    await flush();
    askQuestion(root, '   ');
    await flush();
    const answerCalls = fetchFn.calls.filter((c) => c.url.endsWith('/api/answer'));
    expect(answerCalls).toHaveLength(0);
  });

  it('shows a retryable error on failure', async () => {
    const fetchFn = mockFetch({
      ...catalogRoute,
      '/api/answer': () => jsonResponse({ code: 'text_too_large', message: 'too big' }, 400),
    });
    const { root } = mount(fetchFn);
    submitDocument(root, 'doc');
    await flush();
    askQuestion(root, 'who?');
    await flush();
    expect(root.querySelector('#error-banner')?.textContent).toContain('text_too_large');
  });

  it('cancel-and-replaces an in-flight question', async () => {
    let resolveFirst: ((r: Response) => void) | null = null;
    let calls = 0;
    const fetchFn = mockFetch({
      ...catalogRoute,
      '/api/answer': () => {
        calls += 1;
        if (calls === 1) {
          return new Promise<Response>((resolve) => { resolveFirst = resolve; });
        }
        return jsonResponse({ answerable: true, answer: 'second', score: -0.2 });
      },
    });
    const { root } = mount(fetchFn);
    submitDocument(root, 'doc');
    await flush();
    askQuestion(root, 'first question?');
    askQuestion(root, 'second question?');
    await flush();
    // late arrival of the first response must not clobber the second
    resolveFirst?.(jsonResponse({ answerable: true, answer: 'first', score: -0.1 }));
    await flush();
    expect(root.querySelector('#answer-card .answer-highlight')?.textContent).toBe('second');
  });
});
