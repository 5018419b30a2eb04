import { UiState } from './types';

export interface Handlers {
  onSubmitDocument(text: string): void;
  onAskQuestion(question: string): void;
  onToggleItem(index: number): void;
  onRetry(): void;
}

// All model/server text goes through textContent assignments, never
// innerHTML, so catalog payloads cannot inject markup.
function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function render(root: HTMLElement, state: UiState, handlers: Handlers): void {
  root.textContent = '';

  const heading = el('h1', 'title', 'Q&A catalog demo');
  root.appendChild(heading);

  // document input
  const docForm = el('form', 'doc-form');
  const textarea = el('textarea', 'doc-input');
  textarea.id = 'document-input';
  textarea.rows = 8;
  textarea.value = state.documentText;
  textarea.placeholder = 'Paste a document…';
  const submit = el('button', 'doc-submit', state.loadingCatalog ? 'Generating…' : 'Generate catalog');
  submit.type = 'submit';
  submit.disabled = state.loadingCatalog;
  const validation = el('div', 'doc-validation');
  validation.id = 'doc-validation';
  docForm.append(textarea, submit, validation);
  docForm.addEventListener('submit', (e) => {
    e.preventDefault();
    if (!textarea.value.trim()) {
      validation.textContent = 'Enter some text first.';
      return;
    }
    handlers.onSubmitDocument(textarea.value);
  });
  root.appendChild(docForm);

  // error banner
  if (state.error) {
    const banner = el('div', 'error-banner');
    banner.id = 'error-banner';
    banner.appendChild(el('span', 'error-text', state.error));
    const retry = el('button', 'error-retry', 'Retry');
    retry.addEventListener('click', () => handlers.onRetry());
    banner.appendChild(retry);
    root.appendChild(banner);
  }

  // catalog list: only shown after a successful response
  if (state.catalog !== null) {
    const list = el('ul', 'catalog');
    list.id = 'catalog-list';
    state.catalog.forEach((item, i) => {
      const row = el('li', 'catalog-item');
      const q = el('div', 'item-question', item.question);
      q.addEventListener('click', () => handlers.onToggleItem(i));
      row.appendChild(q);
      if (state.expanded[i]) {
        row.appendChild(el('div', 'item-answer', item.answer));
      }
      list.appendChild(row);
    });
    root.appendChild(list);
    if (state.catalog.length === 0) {
      root.appendChild(el('div', 'catalog-empty', 'No question/answer pairs found.'));
    }
  }

  // custom question: enabled only once a document is present
  const qForm = el('form', 'question-form');
  const qInput = el('input', 'question-input');
  qInput.id = 'question-input';
  qInput.type = 'text';
  qInput.placeholder = 'Ask your own question…';
  qInput.value = state.customQuestion;
  const hasDocument = state.documentText.trim().length > 0;
  qInput.disabled = !hasDocument;
  const ask = el('button', 'question-submit', state.loadingAnswer ? 'Answering…' : 'Ask');
  ask.type = 'submit';
  ask.disabled = !hasDocument;
  qForm.append(qInput, ask);
  qForm.addEventListener('submit', (e) => {
    e.preventDefault();
    if (!qInput.value.trim()) return; // never hit the API with an empty question
    handlers.onAskQuestion(qInput.value);
  });
  root.appendChild(qForm);

  if (state.customAnswer) {
    if (state.customAnswer.kind === 'answer') {
      const card = el('div', 'answer-card');
      card.id = 'answer-card';
      card.appendChild(el('span', 'answer-highlight', state.customAnswer.answer));
      root.appendChild(card);
    } else {
      const msg = el('div', 'no-answer-message', state.customAnswer.message);
      msg.id = 'no-answer-message';
      root.appendChild(msg);
    }
  }
}
