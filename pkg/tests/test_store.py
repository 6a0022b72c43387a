import random
from datetime import timedelta

import pytest

from peerclass.clock import utc
from peerclass.errors import ConflictError, ProfileRequired, ValidationError
from peerclass.store import ClassStatus, InteractionKind, Repository

T0 = utc(2024, 1, 1)


def make_published_class(repo, class_id_hint=None, tags=("science",)):
    entry = repo.stage_submission(
        {
            "teacher_email": f"t{len(repo.tables['classes'])}@x.org",
            "teacher_name": "T",
            "title": f"Class {len(repo.tables['classes'])}",
            "description": "d",
            "schedule": [(T0 + timedelta(days=30)).isoformat()],
        },
        now=T0,
    )
    _, cls = repo.promote_submission(entry.cache_id, list(tags))
    repo.set_class_status(cls.class_id, ClassStatus.PUBLISHED)
    return cls


class TestFindOrCreateStudent:
    def test_creates_on_empty_store(self):
        repo = Repository()
        rec, was_new = repo.find_or_create_student("a@x.org", {"name": "A", "grade": 3}, now=T0)
        assert was_new
        assert rec.email == "a@x.org"

    def test_case_folded_idempotence(self):
        repo = Repository()
        first, _ = repo.find_or_create_student("a@x.org", {"name": "A", "grade": 3}, now=T0)
        second, was_new = repo.find_or_create_student("A@X.ORG", None, now=T0)
        assert not was_new
        assert second.student_id == first.student_id

    def test_unknown_email_without_profile(self):
        repo = Repository()
        with pytest.raises(ProfileRequired):
            repo.find_or_create_student("a@x.org", None, now=T0)

    def test_replay_against_reference_map(self):
        # oracle: plain dict keyed by case-folded email
        rng = random.Random(7)
        repo = Repository()
        reference: dict[str, str] = {}
        emails = [f"user{i}@x.org" for i in range(12)]
        for _ in range(200):
            email = rng.choice(emails)
            variant = email.upper() if rng.random() < 0.5 else email
            give_profile = rng.random() < 0.5
            profile = {"name": "N", "grade": 4} if give_profile else None
            key = email.casefold()
            if key in reference:
                rec, was_new = repo.find_or_create_student(variant, profile, now=T0)
                assert not was_new
                assert rec.student_id == reference[key]
            elif give_profile:
                rec, was_new = repo.find_or_create_student(variant, profile, now=T0)
                assert was_new
                reference[key] = rec.student_id
            else:
                with pytest.raises(ProfileRequired):
                    repo.find_or_create_student(variant, profile, now=T0)

    def test_malformed_email_rejected(self):
        repo = Repository()
        with pytest.raises(ValidationError):
            repo.find_or_create_student("not-an-email", {"name": "A", "grade": 1}, now=T0)


class TestEnroll:
    def test_fresh_pair_counts(self):
        repo = Repository()
        cls = make_published_class(repo)
        student, _ = repo.find_or_create_student("a@x.org", {"name": "A", "grade": 3}, now=T0)
        assert repo.signup_counts() == {}
        repo.enroll(student.student_id, cls.class_id, now=T0)
        assert repo.signup_counts() == {cls.class_id: 1}

    def test_duplicate_is_idempotent(self):
        repo = Repository()
        cls = make_published_class(repo)
        student, _ = repo.find_or_create_student("a@x.org", {"name": "A", "grade": 3}, now=T0)
        first = repo.enroll(student.student_id, cls.class_id, now=T0)
        second = repo.enroll(student.student_id, cls.class_id, now=T0)
        assert first is second
        assert repo.signup_counts() == {cls.class_id: 1}

    def test_unpublished_class_rejected(self):
        repo = Repository()
        entry = repo.stage_submission(
            {"teacher_email": "t@x.org", "teacher_name": "T", "title": "C", "description": "d"}, now=T0
        )
        _, cls = repo.promote_submission(entry.cache_id, ["science"])  # approved, not published
        student, _ = repo.find_or_create_student("a@x.org", {"name": "A", "grade": 3}, now=T0)
        with pytest.raises(ConflictError):
            repo.enroll(student.student_id, cls.class_id, now=T0)

    def test_randomized_counts_match_recount(self):
        rng = random.Random(11)
        repo = Repository()
        classes = [make_published_class(repo) for _ in range(5)]
        students = [
            repo.find_or_create_student(f"s{i}@x.org", {"name": "S", "grade": 2}, now=T0)[0] for i in range(20)
        ]
        for _ in range(100):
            repo.enroll(rng.choice(students).student_id, rng.choice(classes).class_id, now=T0)
        # oracle: brute-force recount over the raw link table
        recount: dict[str, int] = {}
        for link in repo.all("enrollments"):
            recount[link.class_id] = recount.get(link.class_id, 0) + 1
        assert repo.signup_counts() == recount


class TestSubmissions:
    def test_stage_creates_pending(self):
        repo = Repository()
        entry = repo.stage_submission({"teacher_email": "t@x.org", "teacher_name": "T", "title": "C", "description": "d"}, now=T0)
        assert entry.state.value == "pending"

    def test_promote_creates_teacher_and_tags(self):
        repo = Repository()
        entry = repo.stage_submission(
            {"teacher_email": "t@x.org", "teacher_name": "T", "title": "Bio", "description": "d"}, now=T0
        )
        teacher, cls = repo.promote_submission(entry.cache_id, ["Science", "Biology"])
        assert teacher.email == "t@x.org"
        assert cls.status == ClassStatus.APPROVED
        # reference tag set, canonicalized
        assert repo.tags_for_class(cls.class_id) == frozenset({"science", "biology"})
        assert repo.teacher_for_class(cls.class_id).teacher_id == teacher.teacher_id

    def test_promote_twice_conflicts(self):
        repo = Repository()
        entry = repo.stage_submission(
            {"teacher_email": "t@x.org", "teacher_name": "T", "title": "Bio", "description": "d"}, now=T0
        )
        repo.promote_submission(entry.cache_id, ["science"])
        with pytest.raises(ConflictError):
            repo.promote_submission(entry.cache_id, ["science"])

    def test_promote_requires_tags(self):
        repo = Repository()
        entry = repo.stage_submission(
            {"teacher_email": "t@x.org", "teacher_name": "T", "title": "Bio", "description": "d"}, now=T0
        )
        with pytest.raises(ValidationError):
            repo.promote_submission(entry.cache_id, ["  "])


class TestInteractionsAndFeedback:
    def test_event_appends(self):
        repo = Repository()
        before = len(repo.all("interactions"))
        repo.log_interaction("u1", InteractionKind.EMAIL_OPEN, "welcome", at=T0)
        assert len(repo.all("interactions")) == before + 1

    def test_rating_out_of_range(self):
        repo = Repository()
        cls = make_published_class(repo)
        student, _ = repo.find_or_create_student("a@x.org", {"name": "A", "grade": 3}, now=T0)
        with pytest.raises(ValidationError):
            repo.record_feedback(student.student_id, cls.class_id, "overall", 6)

    def test_per_user_totals_match_linear_scan(self):
        rng = random.Random(3)
        repo = Repository()
        users = [f"u{i}" for i in range(7)]
        events = []
        for i in range(50):
            user = rng.choice(users)
            kind = rng.choice(list(InteractionKind))
            repo.log_interaction(user, kind, f"t{i}", at=T0 + timedelta(seconds=i))
            events.append(user)
        for user in users:
            expected = sum(1 for u in events if u == user)  # linear-scan oracle
            assert len(repo.interactions_for_user(user)) == expected


class TestInvariants:
    def test_status_never_moves_backward(self):
        repo = Repository()
        cls = make_published_class(repo)
        with pytest.raises(ConflictError):
            repo.set_class_status(cls.class_id, ClassStatus.STAGED)

    def test_transaction_abort_restores_everything(self):
        repo = Repository()
        make_published_class(repo)
        before = repo.dump()
        with pytest.raises(RuntimeError):
            with repo.transaction():
                cls = make_published_class(repo)
                student, _ = repo.find_or_create_student("a@x.org", {"name": "A", "grade": 3}, now=T0)
                repo.enroll(student.student_id, cls.class_id, now=T0)
                raise RuntimeError("simulated crash")
        assert repo.dump() == before

    def test_referential_audit_clean_and_dirty(self):
        repo = Repository()
        cls = make_published_class(repo)
        student, _ = repo.find_or_create_student("a@x.org", {"name": "A", "grade": 3}, now=T0)
        repo.enroll(student.student_id, cls.class_id, now=T0)
        assert repo.audit_referential_integrity() == []
        del repo.tables["students"][student.student_id]
        assert any("missing student" in p for p in repo.audit_referential_integrity())

    def test_dump_load_round_trip(self):
        repo = Repository()
        cls = make_published_class(repo, tags=("science", "biology"))
        student, _ = repo.find_or_create_student("a@x.org", {"name": "A", "grade": 3}, now=T0)
        repo.enroll(student.student_id, cls.class_id, now=T0)
        text = repo.dump()
        other = Repository()
        other.load(text)
        assert other.dump() == text
        assert other.signup_counts() == repo.signup_counts()
        assert other.tags_for_class(cls.class_id) == repo.tags_for_class(cls.class_id)

    def test_file_backed_store_persists(self, tmp_path):
        path = str(tmp_path / "store.jsonl")
        repo = Repository(path)
        cls = make_published_class(repo)
        reopened = Repository(path)
        assert reopened.get_class(cls.class_id).title == cls.title
