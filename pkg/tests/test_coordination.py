from collections import Counter
from datetime import timedelta

import pytest

from peerclass.errors import ValidationError
from peerclass.store import ActionKind, ActionState

from helpers import enroll_student, publish_class

DAY = 86400.0


def advance_days(platform, days):
    executed = []
    # advance one day at a time so every reminder fires at (or just past) its due time
    for _ in range(days):
        executed += platform.advance_clock(DAY)
    return executed


class TestCadence:
    def test_full_cadence_each_exactly_once(self, platform):
        cls = publish_class(platform, days_out=30)
        enroll_student(platform, cls.class_id)
        advance_days(platform, 32)

        done = [a for a in platform.repo.actions_for_class(cls.class_id)]
        assert all(a.state == ActionState.DONE for a in done)
        kinds = Counter(a.kind for a in done)
        assert kinds == Counter(
            {
                ActionKind.TEACHER_PROMO: 3,
                ActionKind.TARGET_LIST_PROMO: 3,
                ActionKind.LOGISTICS_T14D: 1,
                ActionKind.LOGISTICS_T7D: 1,
                ActionKind.LOGISTICS_T3D: 1,
                ActionKind.LOGISTICS_T1D: 1,
                ActionKind.JOIN_NOW_T10M: 1,
                ActionKind.RECORDING_SHARE: 1,
                ActionKind.RATINGS_REQUEST: 1,
                ActionKind.NEXT_RECS: 1,
            }
        )

        # reminder due times sit at exactly T-14d / T-7d / T-3d / T-1d / T-10min
        session = max(c for c in cls.schedule)
        by_kind = {a.kind: a for a in done}
        assert by_kind[ActionKind.LOGISTICS_T14D].due_at == session - timedelta(days=14)
        assert by_kind[ActionKind.LOGISTICS_T7D].due_at == session - timedelta(days=7)
        assert by_kind[ActionKind.LOGISTICS_T3D].due_at == session - timedelta(days=3)
        assert by_kind[ActionKind.LOGISTICS_T1D].due_at == session - timedelta(days=1)
        assert by_kind[ActionKind.JOIN_NOW_T10M].due_at == session - timedelta(minutes=10)
        assert by_kind[ActionKind.RECORDING_SHARE].due_at == session + timedelta(minutes=cls.duration_minutes)

        # student-facing outbox carries each reminder template exactly once
        student_mail = Counter(
            e.template_id for e in platform.repo.outbox_entries() if e.recipient == "kid@x.org"
        )
        for template in ("logistics_14d", "logistics_7d", "logistics_3d", "logistics_1d", "join_now",
                         "recording_share", "ratings_request", "next_recs"):
            assert student_mail[template] == 1, template

    def test_second_tick_is_a_no_op(self, platform):
        cls = publish_class(platform, days_out=30)
        enroll_student(platform, cls.class_id)
        advance_days(platform, 32)
        count = len(platform.repo.outbox_entries())
        assert platform.advance_clock(DAY) == []
        assert len(platform.repo.outbox_entries()) == count

    def test_promo_variants_follow_due_order(self, platform):
        cls = publish_class(platform, days_out=30)
        advance_days(platform, 8)
        promo_templates = [
            e.template_id for e in platform.repo.outbox_entries() if e.template_id.startswith("teacher_promo")
        ]
        assert promo_templates == ["teacher_promo_1", "teacher_promo_2", "teacher_promo_3"]

    def test_multi_session_join_now_per_session(self, platform):
        cls = publish_class(platform, days_out=20, sessions=3)
        enroll_student(platform, cls.class_id)
        advance_days(platform, 40)
        actions = platform.repo.actions_for_class(cls.class_id)
        join = [a for a in actions if a.kind == ActionKind.JOIN_NOW_T10M]
        assert len(join) == 3
        assert {a.session_at for a in join} == set(cls.schedule)
        # post-class actions anchor to the last session
        rec = [a for a in actions if a.kind == ActionKind.RECORDING_SHARE][0]
        assert rec.due_at == max(cls.schedule) + timedelta(minutes=cls.duration_minutes)

    def test_next_recs_completes_class(self, platform):
        cls = publish_class(platform, days_out=10)
        enroll_student(platform, cls.class_id)
        advance_days(platform, 12)
        assert platform.repo.get_class(cls.class_id).status.value == "completed"

    def test_publish_without_future_session_skips_cadence(self, platform):
        # the service publishes but schedules nothing when all sessions are past
        cls = publish_class(platform, days_out=-5)
        assert platform.repo.actions_for_class(cls.class_id) == []
        # the scheduler itself refuses a class with no future session
        with pytest.raises(ValidationError):
            platform.coordinator.on_class_published(cls.class_id, platform.clock.now())


class TestAssetsAndTargeting:
    def test_assets_folder_and_qr_payload(self, platform):
        cls = publish_class(platform)
        assets = platform.repo.get("assets", cls.class_id)
        assert assets.qr_payload == f"{platform.config.base_url}/classes/{cls.class_id}?src=qr"
        files = platform.ports.folders.folders[assets.folder_link]
        assert set(files) == {"flier.txt", "qr.txt"}
        assert cls.title in files["flier.txt"].decode()
        assert assets.qr_payload in files["flier.txt"].decode()

    def test_target_list_excludes_enrolled(self, platform):
        cls_a = publish_class(platform, title="A")
        cls_b = publish_class(platform, title="B", teacher_email="t2@x.org")
        out_a = enroll_student(platform, cls_a.class_id, email="s1@x.org", name="S1")
        out_b = enroll_student(platform, cls_b.class_id, email="s2@x.org", name="S2")
        targets = platform.coordinator.compute_target_list(cls_a.class_id)
        assert out_a.student_id not in targets
        assert out_b.student_id in targets  # popularity fallback still ranks cl_a in their top 3


class TestRetry:
    def test_transient_failure_retries_then_succeeds(self, platform):
        cls = publish_class(platform, days_out=30)
        platform.ports.email.fail_next(1)
        platform.advance_clock(1.0)  # teacher_promo_1 + target_promo due immediately
        act = [
            a for a in platform.repo.actions_for_class(cls.class_id)
            if a.kind == ActionKind.TEACHER_PROMO and a.attempts > 0
        ]
        assert len(act) == 1
        assert act[0].state == ActionState.PENDING
        assert act[0].attempts == 1
        # rolled back: nothing from the failed attempt in the outbox
        assert all(e.template_id != "teacher_promo_1" for e in platform.repo.outbox_entries())
        platform.advance_clock(31 * 60)  # past the 30-minute backoff
        refetched = platform.repo.get("actions", act[0].action_id)
        assert refetched.state == ActionState.DONE
        assert any(e.template_id == "teacher_promo_1" for e in platform.repo.outbox_entries())

    def test_persistent_failure_dead_letters_after_three_attempts(self, platform):
        cls = publish_class(platform, days_out=30)
        platform.ports.email.fail_next(99)
        platform.advance_clock(1.0)
        for _ in range(4):
            platform.advance_clock(61 * 60)
        promo = [
            a for a in platform.repo.actions_for_class(cls.class_id) if a.kind == ActionKind.TEACHER_PROMO
        ]
        first = sorted(promo, key=lambda a: a.action_id)[0]
        assert first.state == ActionState.DEAD_LETTER
        assert first.attempts == 3

    def test_cancel_class_cancels_pending_only(self, platform):
        cls = publish_class(platform, days_out=30)
        platform.advance_clock(1.0)  # day-0 promos execute
        n = platform.coordinator.cancel_class(cls.class_id)
        states = Counter(a.state for a in platform.repo.actions_for_class(cls.class_id))
        assert states[ActionState.CANCELLED] == n
        assert states[ActionState.PENDING] == 0
        assert platform.advance_clock(40 * DAY) == []
