"""Command-line entry points."""
import argparse
import json
import logging
import sys

from .checkpoint import load_checkpoint, load_model, save_checkpoint


def _add_common(parser):
    parser.add_argument("--log-level", default="warning")


def cmd_train_qa(args):
    from .corpus import load_squad_format
    from .qa.train import QATrainConfig, train_qa

    documents, train = load_squad_format(args.train)
    val = None
    if args.val:
        val_docs, val = load_squad_format(args.val)
        documents = list(documents) + list(val_docs)
    config = QATrainConfig(k_train=args.k, epochs=args.epochs,
                           learning_rate=args.lr, preset=args.preset)
    if args.preset == "base":
        raise SystemExit("the base preset needs pretrained weights; train with --preset desk "
                         "or use the production environment")
    ckpt = train_qa(train, val, documents, config)
    save_checkpoint(args.out, ckpt)
    print(f"saved {args.out}")


def cmd_eval_qa(args):
    from .corpus import load_squad_format
    from .metrics import evaluate_predictions
    from .retrieval import RetrievalConfig

    model = load_model(args.checkpoint)
    documents, examples = load_squad_format(args.test)
    docs = {d.doc_id: d for d in documents}
    predictions, golds = {}, {}
    for ex in examples:
        pred = model.predict(ex.question, docs[ex.doc_ref], RetrievalConfig(k=args.k))
        predictions[ex.qid] = pred.answer_text if pred.answerable else ""
        golds[ex.qid] = [g.text for g in ex.gold_answers]
    report = evaluate_predictions(predictions, golds)
    json.dump(report.to_dict(), sys.stdout, indent=2)
    print()


def cmd_train_qg(args):
    from .corpus import load_qg_examples
    from .qg.train import QGTrainConfig, TrainingRegime, train_qg

    examples = load_qg_examples(args.train)
    val = load_qg_examples(args.val) if args.val else None
    init = load_checkpoint(args.init) if args.init else None
    config = QGTrainConfig(max_steps=args.max_steps, learning_rate=args.lr,
                           validate_every=args.validate_every)
    ckpt = train_qg(examples, TrainingRegime(args.regime), init, config, val=val)
    save_checkpoint(args.out, ckpt)
    print(f"saved {args.out}")


def cmd_generate(args):
    from .corpus import load_qg_examples
    from .qg.beam import BeamConfig

    session = load_model(args.checkpoint)
    examples = load_qg_examples(args.input)
    questions = session.generate([ex.input for ex in examples],
                                 BeamConfig(beam_size=args.beam))
    for q in questions:
        print(json.dumps({"question": q.text, "log_prob": q.log_prob}))


def cmd_catalog(args):
    from .candidates import get_provider
    from .pipeline import FilterConfig, generate_catalog

    with open(args.text, encoding="utf-8") as f:
        text = f.read()
    qg_model = load_model(args.qg_ckpt)
    qa_model = load_model(args.qa_ckpt)
    result = generate_catalog(
        text, qg_model, qa_model,
        provider=get_provider(args.syntax_provider),
        filter_config=FilterConfig(overlap_threshold=args.overlap),
    )
    payload = [it.to_dict() for it in result.items]
    out = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(out + "\n")
    else:
        print(out)
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)


def cmd_serve(args):
    from .service import ServiceConfig, serve

    config = ServiceConfig.from_env()
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            for key, value in json.load(f).items():
                setattr(config, key, value)
    serve(config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qnakit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-qa", help="train the shared-norm QA model")
    p.add_argument("--train", required=True)
    p.add_argument("--val")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--lr", type=float, default=3e-5)
    p.add_argument("--preset", choices=["desk", "base"], default="desk")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_qa)

    p = sub.add_parser("eval-qa", help="evaluate a QA checkpoint (EM/F1 JSON)")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--k", type=int, default=4)
    p.set_defaults(func=cmd_eval_qa)

    p = sub.add_parser("train-qg", help="train a question-generation model")
    p.add_argument("--regime", choices=["standard", "rulemimic", "augmented"],
                   required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--val")
    p.add_argument("--init", help="checkpoint to initialize from (augmented regime)")
    p.add_argument("--max-steps", type=int, default=2000)
    p.add_argument("--validate-every", type=int, default=200)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_qg)

    p = sub.add_parser("generate", help="decode questions for QG inputs")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", required=True, help="JSON Lines of QG examples")
    p.add_argument("--beam", type=int, default=5)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("catalog", help="generate a Q&A catalog for a text file")
    p.add_argument("--text", required=True)
    p.add_argument("--qg-ckpt", required=True)
    p.add_argument("--qa-ckpt", required=True)
    p.add_argument("--overlap", type=float, default=0.6)
    p.add_argument("--syntax-provider", choices=["desk", "production"], default="desk")
    p.add_argument("--top-k", type=int, default=4)
    p.add_argument("--bm25-k1", type=float, default=1.5)
    p.add_argument("--bm25-b", type=float, default=0.75)
    p.add_argument("--out")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_serve)

    for sp in sub.choices.values():
        _add_common(sp)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper()))
    args.func(args)


if __name__ == "__main__":
    main()
