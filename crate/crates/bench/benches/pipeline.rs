use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use ottr_core::check::{spell_check, CheckEnv, Dictionary, FixtureProber};
use ottr_core::course::LoadOptions;
use ottr_core::publish::{build, RenderPlan};
use ottr_core::quiz::{convert_to_coursera, parse_quiz, render_leanpub_quiz};
use ottr_core::sync::compute_patchset;
use ottr_core::{parse_chapter, Target};

fn markdown(c: &mut Criterion) {
    let text = ottr_bench::chapter(0, 200);
    let mut g = c.benchmark_group("markdown");
    g.throughput(Throughput::Bytes(text.len() as u64));
    g.bench_function("parse_chapter", |b| b.iter(|| parse_chapter(black_box(&text), "c.md")));
    g.finish();
}

fn quizzes(c: &mut Criterion) {
    let text = ottr_bench::quiz("bench", 60);
    let quiz = parse_quiz(&text, "q.md").quiz.unwrap();
    let mut g = c.benchmark_group("quiz");
    g.bench_function("parse", |b| b.iter(|| parse_quiz(black_box(&text), "q.md")));
    g.bench_function("render_leanpub", |b| b.iter(|| render_leanpub_quiz(black_box(&quiz))));
    g.bench_function("convert_coursera", |b| b.iter(|| convert_to_coursera(black_box(&quiz))));
    g.finish();
}

fn spelling(c: &mut Criterion) {
    let doc = parse_chapter(&ottr_bench::chapter(0, 200), "c.md");
    let dict = Dictionary::bundled();
    let project = Dictionary::from_wordlist("rnorm\n");
    c.bench_function("spell_check", |b| b.iter(|| spell_check(black_box(&[&doc]), dict, &project)));
}

fn pipeline(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let root = ottr_bench::course(dir.path(), 20, 20);
    let prober = FixtureProber::default();
    let mut plan = RenderPlan::new(Target::ALL);
    plan.fixed_timestamp = Some(0);
    let mut g = c.benchmark_group("build");
    g.sample_size(20);
    g.bench_function("20_chapters_all_targets", |b| {
        b.iter(|| build(&root, &plan, &LoadOptions::default(), &CheckEnv::new(&prober)).unwrap())
    });
    g.finish();
}

fn sync(c: &mut Criterion) {
    c.bench_function("compute_patchset_200_files", |b| {
        b.iter_batched(
            || {
                let dir = tempfile::tempdir().unwrap();
                let up = dir.path().join("up");
                let down = dir.path().join("down");
                for (root, tag) in [(&up, "new"), (&down, "old")] {
                    std::fs::create_dir_all(root.join("scripts")).unwrap();
                    for i in 0..200 {
                        let body = if i % 4 == 0 { format!("{tag} {i}\n") } else { format!("same {i}\n") };
                        std::fs::write(root.join(format!("scripts/s{i}.sh")), body).unwrap();
                    }
                }
                std::fs::write(up.join("_ottr.yml"), "title: U\nchapters: [a.md]\nsync:\n  upstream: x\n  owned: ['scripts/**']\n").unwrap();
                std::fs::write(down.join("_ottr.yml"), "title: D\nchapters: [a.md]\nsync:\n  upstream: ../up\n  opt_in: true\n").unwrap();
                (dir, up, down)
            },
            |(_dir, up, down)| compute_patchset(&up, &down, &[]).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, markdown, quizzes, spelling, pipeline, sync);
criterion_main!(benches);
